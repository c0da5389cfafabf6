/**
 * Aggregation of single-event costs over time: total connected-mode
 * charge in an observation window, and the expected advertiser/scanner
 * charge of one discovery process.
 */
#ifndef BLENERGY_AGGREGATE_HPP
#define BLENERGY_AGGREGATE_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "discovery.hpp"
#include "events.hpp"
#include "profile.hpp"

namespace blenergy {

/**
 * Number of connection events within an observation window T_g.
 * A master attends every interval; a slave skipping N_sl events on
 * average attends floor(T_g / (N_sl * T_c)), where N_sl < 1 means no
 * skipping.
 */
inline long long connected_event_count(double t_g, double t_c, Role role,
                                       double n_sl_avg = 0.0) {
    if (t_g <= 0.0) throw std::invalid_argument("observation window must be > 0");
    if (t_c <= 0.0) throw std::invalid_argument("connection interval must be > 0");
    const double divisor = role == Role::master ? t_c : std::max(1.0, n_sl_avg) * t_c;
    return static_cast<long long>(std::floor(t_g / divisor));
}

/**
 * Total charge over T_g: the attended events plus sleeping in between.
 * `exchanges` is cycled when there are more events than entries.
 */
inline double connected_total_charge(const DeviceProfile& profile,
                                     const ConnectionParams& params,
                                     const std::vector<PacketExchange>& exchanges,
                                     double t_g) {
    if (exchanges.empty()) throw std::invalid_argument("need at least one exchange");
    const long long count =
        connected_event_count(t_g, params.interval, params.role, params.slave_latency_avg);

    double charge = 0.0;
    double busy = 0.0;
    for (long long n = 0; n < count; ++n) {
        const EventCost ev = connection_event_cost(
            profile, params, exchanges[static_cast<std::size_t>(n % exchanges.size())]);
        charge += ev.charge;
        busy += ev.duration;
    }
    if (busy > t_g)
        throw std::invalid_argument("event durations exceed the observation window");
    return charge + (t_g - busy) * profile.sleep_current;
}

/// Charge of one connection interval: one event with `pairs` identical
/// packet pairs plus the sleep remainder of T_c.
inline double charge_per_connection_interval(const DeviceProfile& profile, Role role,
                                             double t_c, int pairs, int rx_bytes,
                                             int tx_bytes, double tx_power_dbm,
                                             double slave_latency_avg = 0.0) {
    ConnectionParams params;
    params.interval = t_c;
    params.role = role;
    params.tx_power_dbm = tx_power_dbm;
    params.slave_latency_avg = slave_latency_avg;
    params.sca_master_ppm = profile.sca_ppm;
    params.sca_slave_ppm = profile.sca_ppm;
    const EventCost ev =
        connection_event_cost(profile, params, PacketExchange::uniform(pairs, rx_bytes, tx_bytes));
    if (ev.duration > t_c)
        throw std::invalid_argument("the event does not fit into one connection interval");
    return ev.charge + (t_c - ev.duration) * profile.sleep_current;
}

/// Per-channel advertising-event costs feeding the discovery energy
/// model: the full three-channel event and the truncated last events.
struct AdvertiserEnergyInputs {
    double q_full = 0.0, d_full = 0.0;  // full event, no response
    double q37 = 0.0, q38 = 0.0, q39 = 0.0;
    double d37 = 0.0, d38 = 0.0, d39 = 0.0;
    double sleep_current = 0.0;

    double q_last_mean() const { return (q37 + q38 + q39) / 3.0; }
    double d_last_mean() const { return (d37 + d38 + d39) / 3.0; }
    double q_last(int channel) const {
        return channel == 37 ? q37 : channel == 38 ? q38 : q39;
    }
};

inline void validate(const AdvertiserEnergyInputs& in) {
    if (!(in.q37 <= in.q38 && in.q38 <= in.q39))
        throw std::invalid_argument("last-event charges must be ordered q37 <= q38 <= q39");
    if (!(in.d37 <= in.d38 && in.d38 <= in.d39))
        throw std::invalid_argument("last-event durations must be ordered d37 <= d38 <= d39");
}

/// Builds the discovery energy inputs from truncated advertising events.
/// Responses are ignored here: the last event is treated like its
/// truncated no-response counterpart.
inline AdvertiserEnergyInputs advertiser_energy_inputs(const DeviceProfile& profile,
                                                       const AdvScanParams& params,
                                                       int payload_bytes = 37,
                                                       double tx_power_dbm = 3.0) {
    AdvertiserEnergyInputs in;
    AdvEventParams ev;
    ev.got_response = false;
    ev.payload_bytes = payload_bytes;
    ev.tx_power_dbm = tx_power_dbm;
    ev.adv_packet_duration = params.adv_packet;
    ev.channel_change_duration = params.channel_change;

    ev.channels_used = 1;
    const EventCost e37 = advertising_event_cost(profile, ev);
    ev.channels_used = 2;
    const EventCost e38 = advertising_event_cost(profile, ev);
    ev.channels_used = 3;
    const EventCost e39 = advertising_event_cost(profile, ev);

    in.q37 = e37.charge; in.d37 = e37.duration;
    in.q38 = e38.charge; in.d38 = e38.duration;
    in.q39 = e39.charge; in.d39 = e39.duration;
    in.q_full = e39.charge;
    in.d_full = e39.duration;
    in.sleep_current = profile.sleep_current;
    return in;
}

/// Expected number of advertising events that fail before the successful
/// one, from the mean discovery latency (clamped at zero).
inline double expected_failed_adv_events(double d_adv_mean, double t_a,
                                         double rho_max = 10e-3) {
    return std::max(0.0, d_adv_mean / (t_a + 0.5 * rho_max) - 1.0);
}

/**
 * Expected advertiser charge of one discovery, from the mean latency
 * alone. Three regimes: the latency ends inside the average last event;
 * it ends between the last event and one interval (sleep remainder); or
 * it spans N_a full events, their sleep gaps and the last event.
 */
inline double expected_advertiser_charge(double d_adv_mean, double t_a,
                                         const AdvertiserEnergyInputs& in,
                                         double rho_max = 10e-3) {
    if (d_adv_mean < 0.0) throw std::invalid_argument("mean latency must be >= 0");
    validate(in);
    const double q_last = in.q_last_mean();
    const double d_last = in.d_last_mean();

    if (d_adv_mean <= d_last) return d_adv_mean / d_last * q_last;
    if (d_adv_mean <= t_a) return q_last + (d_adv_mean - d_last) * in.sleep_current;

    const double n_a = expected_failed_adv_events(d_adv_mean, t_a, rho_max);
    double q = n_a * in.q39 + q_last +
               (d_adv_mean - n_a * t_a - d_last) * in.sleep_current;
    if (n_a >= 1.0) q += (n_a - 1.0) * (t_a - in.d39) * in.sleep_current;
    return q;
}

/// Expected advertiser charge accumulated inside the numeric latency
/// approximation itself: every hit hypothesis contributes its preceding
/// full events, their sleep gaps and the truncated last event.
inline DiscoveryEstimate expected_advertiser_charge_exact(const AdvScanParams& params,
                                                          const AlgoConfig& cfg,
                                                          const AdvertiserEnergyInputs& in) {
    validate(in);
    const double q_gap = in.q_full + (params.adv_interval - in.d_full) * in.sleep_current;
    auto est = detail::run_algorithm1(params, cfg, [&](int n, int ch_idx) {
        return n * q_gap + in.q_last(37 + ch_idx);
    });
    return est;
}

/// Expected scanner charge of one discovery: the scan events within the
/// mean latency plus their sleep remainders. Responses are not charged.
inline double expected_scanner_charge(double d_adv_mean, double t_s, double d_s,
                                      const DeviceProfile& profile) {
    if (d_adv_mean < 0.0) throw std::invalid_argument("mean latency must be >= 0");
    const double n_s = d_adv_mean / t_s;
    const double q_idle = scan_event_cost(profile, ScanMode::passive_or_idle, d_s).charge;
    return n_s * q_idle + n_s * (t_s - d_s) * profile.sleep_current;
}

}  // namespace blenergy

#endif  // BLENERGY_AGGREGATE_HPP
