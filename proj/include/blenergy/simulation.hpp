/**
 * Seeded discrete-event simulation of the advertiser/scanner timing
 * process; the independent check for the discovery estimates.
 *
 * Reproducibility: trial t draws from a std::mt19937_64 engine seeded
 * with splitmix64(seed, t), so runs are bit-identical for a given seed
 * and trials are independent streams. Uniform doubles come from the top
 * 53 bits of the raw engine output, not from distribution objects whose
 * mapping would be implementation-defined.
 */
#ifndef BLENERGY_SIMULATION_HPP
#define BLENERGY_SIMULATION_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <random>
#include <stdexcept>
#include <vector>

#include "aggregate.hpp"
#include "discovery.hpp"
#include "profile.hpp"

namespace blenergy {

struct SimConfig {
    AdvScanParams params;
    int trials = 5000;
    std::uint64_t seed = 1;
    double max_sim_time = 3600.0;  // per-trial cutoff, seconds
};

inline void validate(const SimConfig& cfg) {
    validate(cfg.params);
    if (cfg.trials < 1) throw std::invalid_argument("need at least one trial");
    if (!(cfg.max_sim_time > 0.0)) throw std::invalid_argument("max_sim_time must be > 0");
}

struct TrialOutcome {
    double latency = 0.0;   // advertiser start to end of the received packet
    int events_sent = 0;    // advertising events up to and including the hit
    int hit_channel = 0;    // 37, 38 or 39 (0 when truncated)
    bool truncated = false; // gave up at max_sim_time
};

struct SimSummary {
    double mean = 0.0;
    double stddev = 0.0;
    double median = 0.0;
    double p95 = 0.0;
    double max = 0.0;
    int truncated_count = 0;
};

struct DiscoverySimResult {
    std::vector<TrialOutcome> trials;
    SimSummary summary;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

class TrialRng {
public:
    TrialRng(std::uint64_t seed, std::uint64_t trial)
        : engine_(splitmix64(seed ^ splitmix64(trial + 1))) {}

    double uniform(double lo, double hi) {
        const double u = (engine_() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    }

private:
    std::mt19937_64 engine_;
};

/// First scan event that receives an advertising event starting at t,
/// or -1. Candidate windows are floor(t/T_s) and the next one (whose
/// early region can reach back before its start); the earliest hit wins
/// because its packet is on the earlier channel.
inline long first_hit_scan_event(double t, const AdvScanParams& p,
                                 const ChannelWindow windows[3]) {
    const auto k0 = static_cast<long>(std::floor(t / p.scan_interval));
    for (long k = std::max(0l, k0); k <= k0 + 2; ++k) {
        const ChannelWindow& w = windows[k % 3];
        if (t >= k * p.scan_interval - w.d_early &&
            t <= k * p.scan_interval + p.scan_window - w.d_late)
            return k;
    }
    return -1;
}

inline TrialOutcome run_trial(const SimConfig& cfg, std::uint64_t trial,
                              const ChannelWindow windows[3], double* start_offset = nullptr) {
    const AdvScanParams& p = cfg.params;
    TrialRng rng(cfg.seed, trial);
    const double phi = rng.uniform(0.0, 3.0 * p.scan_interval);
    if (start_offset) *start_offset = phi;

    TrialOutcome out;
    double t = phi;
    for (int n = 0;; ++n) {
        if (t - phi > cfg.max_sim_time) {
            out.truncated = true;
            out.latency = cfg.max_sim_time;
            out.events_sent = n;
            return out;
        }
        const long k = first_hit_scan_event(t, p, windows);
        if (k >= 0) {
            const int channel = windows[k % 3].channel;
            out.latency = (t - phi) + adv_event_air_duration(channel, p);
            out.events_sent = n + 1;
            out.hit_channel = channel;
            return out;
        }
        t += p.adv_interval + rng.uniform(0.0, p.rho_max);
    }
}

inline SimSummary summarize(const std::vector<TrialOutcome>& trials) {
    SimSummary s;
    std::vector<double> lat;
    lat.reserve(trials.size());
    double sum = 0.0;
    for (const auto& t : trials) {
        lat.push_back(t.latency);
        sum += t.latency;
        if (t.truncated) ++s.truncated_count;
    }
    s.mean = sum / static_cast<double>(lat.size());
    double var = 0.0;
    for (double x : lat) var += (x - s.mean) * (x - s.mean);
    s.stddev = lat.size() > 1 ? std::sqrt(var / static_cast<double>(lat.size() - 1)) : 0.0;
    std::sort(lat.begin(), lat.end());
    s.median = lat[lat.size() / 2];
    s.p95 = lat[static_cast<std::size_t>(0.95 * static_cast<double>(lat.size() - 1))];
    s.max = lat.back();
    return s;
}

}  // namespace detail

/// Simulates cfg.trials independent discovery processes.
inline DiscoverySimResult simulate_discovery(const SimConfig& cfg) {
    validate(cfg);
    const ChannelWindow windows[3] = {channel_window(37, cfg.params),
                                      channel_window(38, cfg.params),
                                      channel_window(39, cfg.params)};
    DiscoverySimResult result;
    result.trials.reserve(static_cast<std::size_t>(cfg.trials));
    for (int t = 0; t < cfg.trials; ++t)
        result.trials.push_back(
            detail::run_trial(cfg, static_cast<std::uint64_t>(t), windows));
    result.summary = detail::summarize(result.trials);
    return result;
}

struct DiscoveryChargeSim {
    double advertiser_mean = 0.0;  // coulombs per discovery
    double scanner_mean = 0.0;
};

/// Simulates the charge both sides spend per discovery: the advertiser's
/// full events, sleep gaps and truncated last event; the scanner's scan
/// events (idle-cost accounting) and their sleep remainders.
inline DiscoveryChargeSim simulate_discovery_charge(const SimConfig& cfg,
                                                    const DeviceProfile& profile,
                                                    const AdvertiserEnergyInputs& in) {
    validate(cfg);
    validate(in);
    const AdvScanParams& p = cfg.params;
    const ChannelWindow windows[3] = {channel_window(37, p), channel_window(38, p),
                                      channel_window(39, p)};
    const double q_scan_event =
        scan_event_cost(profile, ScanMode::passive_or_idle, p.scan_window).charge +
        (p.scan_interval - p.scan_window) * profile.sleep_current;

    double adv_sum = 0.0;
    double scan_sum = 0.0;
    for (int t = 0; t < cfg.trials; ++t) {
        double phi = 0.0;
        const TrialOutcome out =
            detail::run_trial(cfg, static_cast<std::uint64_t>(t), windows, &phi);

        const int full_events = std::max(0, out.events_sent - 1);
        double adv = full_events * in.q_full;
        double busy = full_events * in.d_full;
        if (!out.truncated) {
            adv += in.q_last(out.hit_channel);
            busy += out.hit_channel == 37   ? in.d37
                    : out.hit_channel == 38 ? in.d38
                                            : in.d39;
        }
        adv += std::max(0.0, out.latency - busy) * profile.sleep_current;
        adv_sum += adv;

        // scan events whose window starts within the discovery span
        const double t_end = phi + out.latency;
        const auto k_first = static_cast<long>(std::ceil(phi / p.scan_interval));
        const auto k_past = static_cast<long>(std::ceil(t_end / p.scan_interval));
        scan_sum += static_cast<double>(std::max(0l, k_past - k_first)) * q_scan_event;
    }
    const auto n = static_cast<double>(cfg.trials);
    return {adv_sum / n, scan_sum / n};
}

/// Per-trial CSV plus a trailing summary row.
inline void write_trials_csv(std::ostream& os, const DiscoverySimResult& result) {
    os << "trial,latency_s,events,channel,truncated\n";
    char buf[64];
    for (std::size_t i = 0; i < result.trials.size(); ++i) {
        const auto& t = result.trials[i];
        std::snprintf(buf, sizeof buf, "%.12g", t.latency);
        os << i << ',' << buf << ',' << t.events_sent << ',' << t.hit_channel << ','
           << (t.truncated ? 1 : 0) << '\n';
    }
    std::snprintf(buf, sizeof buf, "%.12g", result.summary.mean);
    os << "summary,mean=" << buf;
    std::snprintf(buf, sizeof buf, "%.12g", result.summary.stddev);
    os << ",std=" << buf;
    std::snprintf(buf, sizeof buf, "%.12g", result.summary.median);
    os << ",median=" << buf;
    std::snprintf(buf, sizeof buf, "%.12g", result.summary.p95);
    os << ",p95=" << buf << ",truncated=" << result.summary.truncated_count << '\n';
}

}  // namespace blenergy

#endif  // BLENERGY_SIMULATION_HPP
