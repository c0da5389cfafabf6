/**
 * Expected neighbor-discovery latency.
 *
 * The advertiser fires events every T_a0 plus a random delay drawn
 * uniformly from [0, rho_max]; the scanner listens for d_s every T_s,
 * cycling channels 37 -> 38 -> 39. An advertising event that starts at t
 * is received by scan event k (channel ch = 37 + k mod 3) iff
 * t lies in [k*T_s - d_early(ch), k*T_s + d_s - d_late(ch)], i.e. iff its
 * packet on the scanned channel overlaps the scan window completely.
 *
 * expected_discovery_latency() is the general numeric approximation: it
 * integrates over the advertiser's start offset phi in [0, 3*T_s) and
 * accumulates per-event hit probabilities, modeling the accumulated
 * random delay of event n as uniform (n=1), triangular (n=2) or Gaussian
 * (n>=3). Closed forms cover continuous scanning (d_s = T_s) and the
 * bounded-latency regime (T_a <= d_s - d_a).
 */
#ifndef BLENERGY_DISCOVERY_HPP
#define BLENERGY_DISCOVERY_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

namespace blenergy {

/// Advertising/scanning parameters of one discovery process.
struct AdvScanParams {
    double adv_interval = 1.0;        // T_a0, static advertising interval
    double scan_interval = 2.56;      // T_s
    double scan_window = 1.28;        // d_s
    double adv_packet = 446e-6;       // d_a, one packet slot on air
    double channel_change = 150e-6;   // d_ch
    double rho_max = 10e-3;           // random advertising delay bound
};

inline void validate(const AdvScanParams& p) {
    if (!(p.adv_interval >= 20e-3 && p.adv_interval <= 10.24))
        throw std::invalid_argument("advertising interval must be within 20 ms .. 10.24 s");
    if (!(p.scan_interval > 0.0 && p.scan_interval < 10.24))
        throw std::invalid_argument("scan interval must be within 0 .. 10.24 s");
    if (!(p.scan_window > 0.0 && p.scan_window <= p.scan_interval))
        throw std::invalid_argument("scan window must be within 0 .. T_s");
    if (p.adv_packet <= 0.0 || p.channel_change < 0.0)
        throw std::invalid_argument("packet and channel-change durations must be positive");
    if (p.rho_max < 0.0)
        throw std::invalid_argument("random delay bound must be >= 0");
    if (p.scan_window <= p.adv_packet)
        throw std::invalid_argument("scan window must exceed one advertising packet");
}

/// Quality knobs of the numeric approximation.
struct AlgoConfig {
    double epsilon = 0.9999;  // stop once this much hit probability is covered
    double phi_step = 0.0;    // integration step; 0 means 3*T_s/100
    double d_exp_max = 1000.0;  // abort bound for the per-offset expectation
};

inline double effective_phi_step(const AlgoConfig& cfg, const AdvScanParams& p) {
    return cfg.phi_step > 0.0 ? cfg.phi_step : 3.0 * p.scan_interval / 100.0;
}

inline void validate(const AlgoConfig& cfg, const AdvScanParams& p) {
    if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0))
        throw std::invalid_argument("epsilon must be within (0, 1)");
    const double step = effective_phi_step(cfg, p);
    if (!(step > 0.0 && step < 3.0 * p.scan_interval))
        throw std::invalid_argument("phi step must be within (0, 3*T_s)");
    if (!(cfg.d_exp_max > 0.0))
        throw std::invalid_argument("expectation abort bound must be > 0");
}

/// Reception window geometry of one advertising channel: an event is
/// received by a scan event at t_sE iff its start lies in
/// [t_sE - d_early, t_sE + d_s - d_late]. The effective window width
/// d_s + d_early - d_late equals d_s - d_a on every channel.
struct ChannelWindow {
    int channel = 37;
    double d_early = 0.0;
    double d_late = 0.0;
    double d_s_eff = 0.0;
};

inline ChannelWindow channel_window(int channel, const AdvScanParams& p) {
    const double d_a = p.adv_packet;
    const double d_ch = p.channel_change;
    ChannelWindow w;
    w.channel = channel;
    switch (channel) {
        case 37: w.d_early = 0.0;                 w.d_late = d_a;                 break;
        case 38: w.d_early = d_a + d_ch;          w.d_late = 2.0 * d_a + d_ch;    break;
        case 39: w.d_early = 2.0 * (d_a + d_ch);  w.d_late = 3.0 * d_a + 2.0 * d_ch; break;
        default: throw std::invalid_argument("advertising channel must be 37, 38 or 39");
    }
    w.d_s_eff = p.scan_window + w.d_early - w.d_late;
    return w;
}

/// Elapsed time from an advertising event's start to the end of its
/// packet on the given channel.
inline double adv_event_air_duration(int channel, const AdvScanParams& p) {
    switch (channel) {
        case 37: return p.adv_packet;
        case 38: return 2.0 * p.adv_packet + p.channel_change;
        case 39: return 3.0 * p.adv_packet + 2.0 * p.channel_change;
        default: throw std::invalid_argument("advertising channel must be 37, 38 or 39");
    }
}

/// Standard normal CDF via the complementary error function.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

/**
 * CDF at t of the sum of n i.i.d. uniform [0, rho_max] delays: exact for
 * n <= 2 (uniform, then the triangular self-convolution), Gaussian with
 * mean n*rho_max/2 and std sqrt(n/12)*rho_max for n >= 3. n = 0 is the
 * degenerate no-delay case (a step at zero).
 */
inline double rho_sum_cdf(int n, double t, double rho_max = 10e-3) {
    if (n < 0) throw std::invalid_argument("event index must be >= 0");
    if (n == 0 || rho_max <= 0.0) return t < 0.0 ? 0.0 : 1.0;
    const double x = t / rho_max;
    if (n == 1) {
        if (x <= 0.0) return 0.0;
        if (x >= 1.0) return 1.0;
        return x;
    }
    if (n == 2) {
        if (x <= 0.0) return 0.0;
        if (x >= 2.0) return 1.0;
        if (x <= 1.0) return 0.5 * x * x;
        return 1.0 - 0.5 * (2.0 - x) * (2.0 - x);
    }
    const double mean = 0.5 * n;
    const double std = std::sqrt(n / 12.0);
    return normal_cdf((x - mean) / std);
}

/**
 * Probability that advertising event n (ideal start t_ai = phi + n*T_a,
 * actual start shifted by the n accumulated random delays) is received
 * by scan event k.
 */
inline double hit_probability(int k, int n, double t_ai, const ChannelWindow& w,
                              double t_s, double d_s, double rho_max = 10e-3) {
    const double upper = k * t_s + d_s - w.d_late - t_ai;
    const double lower = k * t_s - w.d_early - t_ai;
    const double p = rho_sum_cdf(n, upper, rho_max) - rho_sum_cdf(n, lower, rho_max);
    return std::clamp(p, 0.0, 1.0);
}

enum class DiscoveryMethod { algorithm1, continuous_closed_form, bounded_closed_form };

inline const char* to_string(DiscoveryMethod m) {
    switch (m) {
        case DiscoveryMethod::algorithm1: return "algorithm1";
        case DiscoveryMethod::continuous_closed_form: return "continuous";
        case DiscoveryMethod::bounded_closed_form: return "bounded";
    }
    return "?";
}

struct DiscoveryEstimate {
    double latency_mean = 0.0;  // expected time from advertiser start to reception
    bool aborted = false;       // some start offset exceeded d_exp_max
    std::optional<double> adv_charge_mean;  // filled by the charge accumulation
    DiscoveryMethod method = DiscoveryMethod::algorithm1;
    std::optional<double> latency_max;      // bound, where one exists
};

namespace detail {

/**
 * The numeric approximation, shared by the latency estimate and the
 * in-loop advertiser-charge accumulation. For every hit hypothesis
 * (event n on channel ch with probability p_k, given the miss
 * probability p_cm of all earlier events), `extra` returns an optional
 * second quantity to average the same way as the latency.
 */
template <typename ExtraFn>
DiscoveryEstimate run_algorithm1(const AdvScanParams& p, const AlgoConfig& cfg,
                                 ExtraFn&& extra) {
    validate(p);
    validate(cfg, p);

    const double t_s = p.scan_interval;
    const double d_s = p.scan_window;
    const double rho_mean = 0.5 * p.rho_max;
    const double step = effective_phi_step(cfg, p);
    const auto offsets = static_cast<long>(std::floor(3.0 * t_s / step + 1e-9));

    // Safety stop for degenerate configurations (e.g. rho_max = 0 at an
    // exact resonance) where no event can ever hit and d_exp stays flat.
    const double latency_hard_cap = 100.0 * cfg.d_exp_max;

    const ChannelWindow windows[3] = {channel_window(37, p), channel_window(38, p),
                                      channel_window(39, p)};
    const double event_air[3] = {adv_event_air_duration(37, p),
                                 adv_event_air_duration(38, p),
                                 adv_event_air_duration(39, p)};

    double latency_sum = 0.0;
    double extra_sum = 0.0;
    bool aborted = false;

    for (long i = 0; i < offsets; ++i) {
        const double phi = i * step;
        double d_exp = 0.0;
        double extra_exp = 0.0;
        double p_cm = 1.0;
        for (int n = 0; 1.0 - p_cm <= cfg.epsilon; ++n) {
            const double t_ai = phi + n * p.adv_interval;
            const auto k_min = static_cast<long>(std::floor(t_ai / t_s));
            const auto k_max = static_cast<long>(std::floor((t_ai + n * rho_mean) / t_s));
            double p_hit = 0.0;
            for (long k = k_min; k <= k_max; ++k) {
                const int ch_idx = static_cast<int>(k % 3);
                const double p_k = hit_probability(static_cast<int>(k), n, t_ai,
                                                   windows[ch_idx], t_s, d_s, p.rho_max);
                p_hit += p_k;
                const double latency = n * (p.adv_interval + rho_mean) + event_air[ch_idx];
                d_exp += p_k * p_cm * latency;
                extra_exp += p_k * p_cm * extra(n, ch_idx);
            }
            p_cm *= 1.0 - std::clamp(p_hit, 0.0, 1.0);
            if (d_exp > cfg.d_exp_max ||
                n * (p.adv_interval + rho_mean) > latency_hard_cap) {
                aborted = true;
                break;
            }
        }
        latency_sum += d_exp;
        extra_sum += extra_exp;
    }

    DiscoveryEstimate est;
    est.method = DiscoveryMethod::algorithm1;
    est.latency_mean = latency_sum / static_cast<double>(offsets);
    est.adv_charge_mean = extra_sum / static_cast<double>(offsets);
    est.aborted = aborted;
    return est;
}

}  // namespace detail

/// Expected discovery latency for arbitrary legal (T_a, T_s, d_s); the
/// numeric approximation over the advertiser's start offset. When a start
/// offset exceeds d_exp_max the estimate is aborted and `latency_mean`
/// is only a lower bound.
inline DiscoveryEstimate expected_discovery_latency(const AdvScanParams& p,
                                                    const AlgoConfig& cfg = {}) {
    auto est = detail::run_algorithm1(p, cfg, [](int, int) { return 0.0; });
    est.adv_charge_mean.reset();
    return est;
}

/// Latency bound for continuous scanning (holds whenever the advertiser
/// cannot skip a whole 3*T_s channel cycle).
inline double discovery_latency_max_continuous(const AdvScanParams& p) {
    return p.adv_interval + 3.0 * p.adv_packet + 2.0 * p.channel_change;
}

/**
 * Closed form for continuous scanning (d_s = T_s): the scanner listens
 * back to back and only an event starting within d_late(39) of the
 * 39 -> 37 wrap is lost and repeated. The random delay enters through
 * the effective interval T_a' = T_a + rho_max/2.
 */
inline DiscoveryEstimate expected_discovery_latency_continuous(const AdvScanParams& p) {
    validate(p);
    if (std::abs(p.scan_interval - p.scan_window) > 0.01 * p.scan_interval)
        throw std::invalid_argument("the continuous-scanning form needs d_s = T_s");

    const double d_a = p.adv_packet;
    const double d_ch = p.channel_change;
    const double d_s = p.scan_window;
    const double t_a_eff = p.adv_interval + 0.5 * p.rho_max;

    const double p37 = (d_s - d_a) / (3.0 * d_s);
    const double p38 = (d_s - d_a - d_ch) / (3.0 * d_s);
    const double p39 = p38;
    const double p_loss = (3.0 * d_a + 2.0 * d_ch) / (3.0 * d_s);

    DiscoveryEstimate est;
    est.method = DiscoveryMethod::continuous_closed_form;
    est.latency_mean = d_a * p37 + (2.0 * d_a + d_ch) * p38 +
                       (3.0 * d_a + 2.0 * d_ch) * p39 + (t_a_eff + d_a) * p_loss;
    est.latency_max = discovery_latency_max_continuous(p);
    return est;
}

/// Latency bound for the bounded regime (T_a small enough that the first
/// scan window after the advertiser starts is always reached in time).
inline double discovery_latency_max_bounded(const AdvScanParams& p) {
    return std::ceil((p.scan_interval - p.scan_window) / p.adv_interval) * p.adv_interval +
           3.0 * p.adv_packet + 2.0 * p.channel_change;
}

/**
 * Closed form for d_s < T_s and T_a <= d_s - d_a. Events are then at
 * most one effective window apart, so the first window whose reception
 * region starts after the advertiser's offset phi catches an event, and
 * the expectation over uniform phi decomposes per channel into the
 * in-window region (immediate hit) and the preceding gap (ceil-counted
 * advertising intervals). The gap before a channel-37 window is longer
 * by the full event air time because the 39-window's late region ends it.
 */
inline DiscoveryEstimate expected_discovery_latency_bounded(const AdvScanParams& p) {
    validate(p);
    const double d_a = p.adv_packet;
    const double d_s = p.scan_window;
    const double t_s = p.scan_interval;
    if (!(d_s < t_s))
        throw std::invalid_argument("the bounded form needs d_s < T_s");
    if (!(p.adv_interval <= d_s - d_a))
        throw std::invalid_argument("the bounded form needs T_a <= d_s - d_a");

    const double t_a_eff = p.adv_interval + 0.5 * p.rho_max;
    const double width = d_s - d_a;  // effective window, identical per channel

    double sum = 0.0;
    for (int ch = 37; ch <= 39; ++ch) {
        const ChannelWindow w = channel_window(ch, p);
        const ChannelWindow prev = channel_window(ch == 37 ? 39 : ch - 1, p);
        const double gap = std::max(0.0, t_s - d_s - w.d_early + prev.d_late);
        const double air = adv_event_air_duration(ch, p);

        // integral over the gap of ceil(x/T)*T: full steps plus the
        // partial last step.
        const double m = std::floor(gap / t_a_eff);
        const double r = gap - m * t_a_eff;
        const double gap_wait = t_a_eff * t_a_eff * m * (m + 1.0) / 2.0 +
                                (m + 1.0) * t_a_eff * r;

        sum += gap_wait + (gap + width) * air;
    }

    DiscoveryEstimate est;
    est.method = DiscoveryMethod::bounded_closed_form;
    est.latency_mean = sum / (3.0 * t_s);
    est.latency_max = discovery_latency_max_bounded(p);
    return est;
}

}  // namespace blenergy

#endif  // BLENERGY_DISCOVERY_HPP
