/**
 * Sensitivity of the per-interval charge to the measured variation of a
 * single phase parameter, all others held at their averages.
 *
 * For a phase duration, lengthening the phase also shortens the sleep
 * remainder of the interval, so S(d_ph) = I_ph - I_sl per occurrence.
 * For a phase current, S(I_ph) is the total time the phase is active
 * within one event (summed over packet pairs where it repeats).
 * delta_Q is the full min-to-max swing of the interval charge.
 */
#ifndef BLENERGY_SENSITIVITY_HPP
#define BLENERGY_SENSITIVITY_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "aggregate.hpp"
#include "events.hpp"
#include "profile.hpp"

namespace blenergy {

enum class ConnectedPhase { head, pre, cpre, rxtx, txrx, tra, post, tail, pretx, prerx, rx, tx };

inline const char* to_string(ConnectedPhase ph) {
    switch (ph) {
        case ConnectedPhase::head: return "head";
        case ConnectedPhase::pre: return "pre";
        case ConnectedPhase::cpre: return "cpre";
        case ConnectedPhase::rxtx: return "rxtx";
        case ConnectedPhase::txrx: return "txrx";
        case ConnectedPhase::tra: return "tra";
        case ConnectedPhase::post: return "post";
        case ConnectedPhase::tail: return "tail";
        case ConnectedPhase::pretx: return "pretx";
        case ConnectedPhase::prerx: return "prerx";
        case ConnectedPhase::rx: return "rx";
        case ConnectedPhase::tx: return "tx";
    }
    return "?";
}

enum class SensitivityKind { duration, current };

inline const char* to_string(SensitivityKind k) {
    return k == SensitivityKind::duration ? "duration" : "current";
}

struct SensitivityReport {
    ConnectedPhase phase;
    SensitivityKind kind;
    double sensitivity = 0.0;      // A (duration kind) or s (current kind)
    double delta_q = 0.0;          // coulombs over the min..max spread
    double relative_change = 0.0;  // delta_q / Q_total of one interval
};

namespace detail {

struct PhaseUsage {
    double occurrences = 0.0;  // how often the tabulated duration occurs per event
    double current = 0.0;      // effective current while the phase is active
    double active_time = 0.0;  // total active time per event (for current kind)
};

inline PhaseUsage phase_usage(const DeviceProfile& profile, ConnectedPhase ph,
                              const ConnectionParams& params, const PacketExchange& ex) {
    const auto& c = profile.connected;
    const auto n_seq = static_cast<double>(ex.pairs.size());
    const bool slave = params.role == Role::slave;
    PhaseUsage u;
    switch (ph) {
        case ConnectedPhase::head: u = {1, c.head.current.avg, c.head.duration.avg}; break;
        case ConnectedPhase::pre: u = {1, c.pre.current.avg, c.pre.duration.avg}; break;
        case ConnectedPhase::cpre: u = {1, c.cpre.current.avg, c.cpre.duration.avg}; break;
        case ConnectedPhase::tra: u = {1, c.tra.current.avg, c.tra.duration.avg}; break;
        case ConnectedPhase::post: u = {1, c.post.current.avg, c.post.duration.avg}; break;
        case ConnectedPhase::tail: u = {1, c.tail.current.avg, c.tail.duration.avg}; break;
        case ConnectedPhase::rxtx:
            u.occurrences = slave ? n_seq : n_seq - 1.0;
            u.current = c.rxtx.current.avg;
            u.active_time = u.occurrences * c.rxtx.duration.avg;
            break;
        case ConnectedPhase::txrx:
            u.occurrences = slave ? n_seq - 1.0 : n_seq;
            u.current = c.txrx.current.avg;
            u.active_time = u.occurrences * c.txrx.duration.avg;
            break;
        case ConnectedPhase::pretx:
            u.occurrences = n_seq;
            u.current = tx_current(profile, params.tx_power_dbm);
            u.active_time = u.occurrences * c.pretx_d.avg;
            break;
        case ConnectedPhase::prerx:
            // A slave's first rx-phase uses the dedicated longer offset,
            // so the tabulated prerx only occurs in the remaining pairs.
            u.occurrences = slave ? n_seq - 1.0 : n_seq;
            u.current = c.rx_i.avg;
            u.active_time = u.occurrences * c.prerx_d.avg;
            break;
        case ConnectedPhase::rx: {
            u.occurrences = 0.0;
            u.current = c.rx_i.avg;
            double t = window_widening(params);  // I_ww = I_rx
            for (std::size_t i = 0; i < ex.pairs.size(); ++i)
                t += rx_duration(profile, ex.pairs[i].rx_bytes, slave && i == 0);
            u.active_time = t;
            break;
        }
        case ConnectedPhase::tx: {
            u.occurrences = 0.0;
            u.current = tx_current(profile, params.tx_power_dbm);
            double t = 0.0;
            for (const auto& pair : ex.pairs) t += tx_duration(profile, pair.tx_bytes);
            u.active_time = t;
            break;
        }
    }
    return u;
}

inline const PhaseStats* duration_stats(const DeviceProfile& p, ConnectedPhase ph) {
    const auto& c = p.connected;
    switch (ph) {
        case ConnectedPhase::head: return &c.head.duration;
        case ConnectedPhase::pre: return &c.pre.duration;
        case ConnectedPhase::cpre: return &c.cpre.duration;
        case ConnectedPhase::rxtx: return &c.rxtx.duration;
        case ConnectedPhase::txrx: return &c.txrx.duration;
        case ConnectedPhase::tra: return &c.tra.duration;
        case ConnectedPhase::post: return &c.post.duration;
        case ConnectedPhase::tail: return &c.tail.duration;
        case ConnectedPhase::pretx: return &c.pretx_d;
        case ConnectedPhase::prerx: return &c.prerx_d;
        default: return nullptr;  // rx/tx durations are payload-driven
    }
}

inline const PhaseStats* current_stats(const DeviceProfile& p, ConnectedPhase ph) {
    const auto& c = p.connected;
    switch (ph) {
        case ConnectedPhase::head: return &c.head.current;
        case ConnectedPhase::pre: return &c.pre.current;
        case ConnectedPhase::cpre: return &c.cpre.current;
        case ConnectedPhase::rxtx: return &c.rxtx.current;
        case ConnectedPhase::txrx: return &c.txrx.current;
        case ConnectedPhase::tra: return &c.tra.current;
        case ConnectedPhase::post: return &c.post.current;
        case ConnectedPhase::tail: return &c.tail.current;
        case ConnectedPhase::rx: return &c.rx_i;
        case ConnectedPhase::tx: return &c.tx_i;
        default: return nullptr;  // pretx/prerx carry no current of their own
    }
}

inline double interval_charge(const DeviceProfile& profile, const ConnectionParams& params,
                              const PacketExchange& ex, std::optional<double> q_total) {
    if (q_total) return *q_total;
    const EventCost ev = connection_event_cost(profile, params, ex);
    return ev.charge + (params.interval - ev.duration) * profile.sleep_current;
}

}  // namespace detail

/// Sensitivity of the interval charge to the phase's duration spread.
/// `q_total` overrides the Eq.-style interval charge when the reference
/// scenario's total is known independently.
inline SensitivityReport duration_sensitivity(const DeviceProfile& profile, ConnectedPhase ph,
                                              const ConnectionParams& params,
                                              const PacketExchange& ex,
                                              std::optional<double> q_total = {}) {
    const PhaseStats* d = detail::duration_stats(profile, ph);
    if (!d)
        throw std::invalid_argument(std::string("phase '") + to_string(ph) +
                                    "' has no duration variation data");
    const auto usage = detail::phase_usage(profile, ph, params, ex);
    SensitivityReport r;
    r.phase = ph;
    r.kind = SensitivityKind::duration;
    r.sensitivity = usage.occurrences * (usage.current - profile.sleep_current);
    r.delta_q = d->spread() * r.sensitivity;
    r.relative_change = r.delta_q / detail::interval_charge(profile, params, ex, q_total);
    return r;
}

/// Sensitivity of the interval charge to the phase's current spread.
/// `current_spread` substitutes the profile's min-to-max spread for
/// what-if analyses.
inline SensitivityReport current_sensitivity(const DeviceProfile& profile, ConnectedPhase ph,
                                             const ConnectionParams& params,
                                             const PacketExchange& ex,
                                             std::optional<double> q_total = {},
                                             std::optional<double> current_spread = {}) {
    const PhaseStats* i = detail::current_stats(profile, ph);
    if (!i)
        throw std::invalid_argument(std::string("phase '") + to_string(ph) +
                                    "' has no current variation data");
    const auto usage = detail::phase_usage(profile, ph, params, ex);
    SensitivityReport r;
    r.phase = ph;
    r.kind = SensitivityKind::current;
    r.sensitivity = usage.active_time;
    r.delta_q = current_spread.value_or(i->spread()) * r.sensitivity;
    r.relative_change = r.delta_q / detail::interval_charge(profile, params, ex, q_total);
    return r;
}

/// Full per-phase table: one row per phase and kind that has variation
/// data in the profile.
inline std::vector<SensitivityReport> sensitivity_table(const DeviceProfile& profile,
                                                        const ConnectionParams& params,
                                                        const PacketExchange& ex,
                                                        std::optional<double> q_total = {}) {
    std::vector<SensitivityReport> rows;
    for (ConnectedPhase ph :
         {ConnectedPhase::head, ConnectedPhase::pre, ConnectedPhase::cpre, ConnectedPhase::rxtx,
          ConnectedPhase::txrx, ConnectedPhase::tra, ConnectedPhase::post, ConnectedPhase::tail,
          ConnectedPhase::pretx, ConnectedPhase::prerx, ConnectedPhase::rx, ConnectedPhase::tx}) {
        if (detail::duration_stats(profile, ph))
            rows.push_back(duration_sensitivity(profile, ph, params, ex, q_total));
        if (detail::current_stats(profile, ph))
            rows.push_back(current_sensitivity(profile, ph, params, ex, q_total));
    }
    return rows;
}

}  // namespace blenergy

#endif  // BLENERGY_SENSITIVITY_HPP
