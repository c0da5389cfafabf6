/**
 * Single-event charge and duration models: connection events, advertising
 * events, scan events, and the connection establishment / parameter-update
 * procedures.
 *
 * Every event is a sum of phase charges Q_ph = d_ph * I_ph plus the
 * profile's correction offsets. All inputs and outputs are SI.
 */
#ifndef BLENERGY_EVENTS_HPP
#define BLENERGY_EVENTS_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "profile.hpp"

namespace blenergy {

enum class Role { master, slave };

inline const char* to_string(Role r) { return r == Role::master ? "master" : "slave"; }

/// Connected-mode protocol parameters.
struct ConnectionParams {
    double interval = 0.1;          // T_c, seconds
    double slave_latency_avg = 0.0; // average skipped events N_sl
    double sca_master_ppm = 50.0;
    double sca_slave_ppm = 50.0;
    double tx_power_dbm = 3.0;
    Role role = Role::slave;
};

inline void validate(const ConnectionParams& p) {
    if (!(p.interval >= 7.5e-3 && p.interval <= 4.0))
        throw std::invalid_argument("connection interval must be within 7.5 ms .. 4.0 s");
    if (!(p.slave_latency_avg >= 0.0 && p.slave_latency_avg <= 500.0))
        throw std::invalid_argument("slave latency must be within 0 .. 500 events");
    if (p.sca_master_ppm < 0.0 || p.sca_slave_ppm < 0.0)
        throw std::invalid_argument("sleep clock accuracy must be >= 0 ppm");
}

/// One master->slave / slave->master packet pair of a connection event.
struct PacketPair {
    int rx_bytes = 0;
    int tx_bytes = 0;
};

/// The packet pairs exchanged within one connection event (N_seq >= 1).
struct PacketExchange {
    std::vector<PacketPair> pairs;

    static PacketExchange uniform(int n_pairs, int rx_bytes, int tx_bytes) {
        if (n_pairs < 1) throw std::invalid_argument("an exchange needs at least one packet pair");
        PacketExchange e;
        e.pairs.assign(static_cast<std::size_t>(n_pairs), {rx_bytes, tx_bytes});
        return e;
    }
};

inline void validate(const PacketExchange& e) {
    if (e.pairs.empty()) throw std::invalid_argument("an exchange needs at least one packet pair");
    for (const auto& p : e.pairs)
        if (p.rx_bytes < 0 || p.tx_bytes < 0)
            throw std::invalid_argument("byte counts must be >= 0");
}

struct EventCost {
    double charge = 0.0;    // coulombs
    double duration = 0.0;  // seconds
};

/// Extra listening time a slave prepends to absorb sleep-clock drift:
/// (SCA_ma + SCA_sl) * T_c * N_sl / 1e6. Zero for a master, which owns
/// the connection timing.
inline double window_widening(const ConnectionParams& p) {
    if (p.role == Role::master) return 0.0;
    return (p.sca_master_ppm + p.sca_slave_ppm) * p.interval * p.slave_latency_avg * 1e-6;
}

/// rx-phase duration: payload on air plus the receiver spin-up offset.
/// The first rx-phase of a slave's connection event uses the longer
/// effective offset measured for that case.
inline double rx_duration(const DeviceProfile& profile, int n_rx_bytes,
                          bool first_rx_of_slave_event = false) {
    if (n_rx_bytes < 0) throw std::invalid_argument("rx byte count must be >= 0");
    const double offset = first_rx_of_slave_event ? profile.connected.slave_first_prerx
                                                  : profile.connected.prerx_d.avg;
    return n_rx_bytes * 8.0 * profile.bit_duration + offset;
}

/// tx-phase duration: d_pretx + N_tx * 8 bit-times.
inline double tx_duration(const DeviceProfile& profile, int n_tx_bytes) {
    if (n_tx_bytes < 0) throw std::invalid_argument("tx byte count must be >= 0");
    return profile.connected.pretx_d.avg + n_tx_bytes * 8.0 * profile.bit_duration;
}

/**
 * Charge and duration of one connection event.
 *
 * Phase sequence for a slave: head, pre, cpre, ww, then per packet pair
 * rx, rxtx, tx, txrx (the txrx after the last pair is dropped), then
 * tra, post, tail. A per-pair charge offset Q_to absorbs supply-line
 * distortion. For a master the rx/tx order is swapped (tx, txrx, rx,
 * rxtx; trailing rxtx dropped) and there is no ww phase.
 */
inline EventCost connection_event_cost(const DeviceProfile& profile,
                                       const ConnectionParams& params,
                                       const PacketExchange& exchange) {
    validate(params);
    validate(exchange);

    const auto& c = profile.connected;
    const double i_tx = tx_current(profile, params.tx_power_dbm);
    const double i_rx = c.rx_i.avg;

    double charge = c.head.duration.avg * c.head.current.avg +
                    c.pre.duration.avg * c.pre.current.avg +
                    c.cpre.duration.avg * c.cpre.current.avg;
    double duration = c.head.duration.avg + c.pre.duration.avg + c.cpre.duration.avg;

    const double d_ww = window_widening(params);
    charge += d_ww * i_rx;  // I_ww = I_rx
    duration += d_ww;

    const double q_rxtx = c.rxtx.duration.avg * c.rxtx.current.avg;
    const double q_txrx = c.txrx.duration.avg * c.txrx.current.avg;
    const bool slave = params.role == Role::slave;

    for (std::size_t i = 0; i < exchange.pairs.size(); ++i) {
        const auto& pair = exchange.pairs[i];
        const double d_rx = rx_duration(profile, pair.rx_bytes, slave && i == 0);
        const double d_tx = tx_duration(profile, pair.tx_bytes);
        charge += d_rx * i_rx + d_tx * i_tx + q_rxtx + q_txrx + c.to_q.avg;
        duration += d_rx + d_tx + c.rxtx.duration.avg + c.txrx.duration.avg;
    }
    // The switch phase after the last pair does not occur: tx->rx for a
    // slave (txrx), rx->tx for a master (rxtx).
    if (slave) {
        charge -= q_txrx;
        duration -= c.txrx.duration.avg;
    } else {
        charge -= q_rxtx;
        duration -= c.rxtx.duration.avg;
    }

    charge += c.tra.duration.avg * c.tra.current.avg +
              c.post.duration.avg * c.post.current.avg +
              c.tail.duration.avg * c.tail.current.avg;
    duration += c.tra.duration.avg + c.post.duration.avg + c.tail.duration.avg;

    return {charge, duration};
}

/// Parameters of one advertising event.
struct AdvEventParams {
    int channels_used = 3;      // packets sent on channels 37.. (1..3)
    bool got_response = false;  // a scan-request/connect-request reply arrives
    int response_bytes = 0;
    int payload_bytes = 37;     // advertising packet length per channel
    double tx_power_dbm = 3.0;
    // Air-timing constants; unset means the profile defaults
    // (37 bytes + IFS for d_a, IFS for d_ch).
    std::optional<double> adv_packet_duration;
    std::optional<double> channel_change_duration;
};

/**
 * Charge and duration of one advertising event, modeled as a master-style
 * event: wake-up block, one tx phase per used channel with a d_ch
 * turnaround gap in between, an rx phase only when a response arrives,
 * then the wind-down block. `channels_used` < 3 covers the truncated
 * last event of a discovery (success on channel 37 or 38).
 *
 * The duration uses the air-timing convention of the discovery model:
 * each packet occupies one d_a slot (payload plus response-listen IFS).
 */
inline EventCost advertising_event_cost(const DeviceProfile& profile,
                                        const AdvEventParams& params) {
    if (params.channels_used < 1 || params.channels_used > 3)
        throw std::invalid_argument("an advertising event uses 1..3 channels");
    if (params.response_bytes < 0 || params.payload_bytes < 0)
        throw std::invalid_argument("byte counts must be >= 0");

    const auto& c = profile.connected;
    const double d_a = params.adv_packet_duration.value_or(profile.adv_packet_duration());
    const double d_ch = params.channel_change_duration.value_or(profile.channel_change_duration());
    const double i_tx = tx_current(profile, params.tx_power_dbm);
    const int n = params.channels_used;

    double charge = c.head.duration.avg * c.head.current.avg +
                    c.pre.duration.avg * c.pre.current.avg +
                    c.cpre.duration.avg * c.cpre.current.avg;
    charge += n * tx_duration(profile, params.payload_bytes) * i_tx;
    charge += (n - 1) * d_ch * c.txrx.current.avg;  // turnaround between channels

    double duration = c.head.duration.avg + c.pre.duration.avg + c.cpre.duration.avg +
                      n * d_a + (n - 1) * d_ch;

    if (params.got_response) {
        const double d_rx = rx_duration(profile, params.response_bytes);
        charge += c.txrx.duration.avg * c.txrx.current.avg + d_rx * c.rx_i.avg + c.to_q.avg;
        duration += c.txrx.duration.avg + d_rx;
    }

    charge += c.tra.duration.avg * c.tra.current.avg +
              c.post.duration.avg * c.post.current.avg +
              c.tail.duration.avg * c.tail.current.avg;
    duration += c.tra.duration.avg + c.post.duration.avg + c.tail.duration.avg;

    return {charge, duration};
}

enum class ScanMode {
    active_with_response,  // advertising packet received, scan request served
    passive_or_idle,       // nothing received (or passive scanning)
    connect_request,       // reception answered with a connection request
    continuous_segment     // one d_s slice of back-to-back scanning
};

/**
 * Charge and duration of one scan event.
 *
 * active_with_response: pre, idle scanning for d_scan = d_s minus the
 * handshake phases, rxtx, tx (scan request), txrx, rxsr (scan response),
 * rxrx, post, plus the ctx/crx correction offsets.
 * passive_or_idle: pre + d_s of listening + post.
 * connect_request: the caller passes d_s already truncated at the end of
 * the received advertising packet; the rxtx, rxsr, rxrx phases and the
 * crx offset are dropped.
 * continuous_segment: d_s of listening plus one channel change, no
 * pre/post phases.
 */
inline EventCost scan_event_cost(const DeviceProfile& profile, ScanMode mode, double d_s,
                                 int n_tx_bytes = 0, int n_rx_bytes = 0) {
    if (d_s <= 0.0) throw std::invalid_argument("scan window must be > 0");
    if (n_tx_bytes < 0 || n_rx_bytes < 0)
        throw std::invalid_argument("byte counts must be >= 0");

    const auto& s = profile.scan;
    const double q_pre = s.pre_s.duration.avg * s.pre_s.current.avg;
    const double q_post = s.post_s.duration.avg * s.post_s.current.avg;
    const double d_tx = s.pretx_s_d.avg + n_tx_bytes * 8.0 * profile.bit_duration;
    const double d_rxsr = s.prerx_s_d.avg + n_rx_bytes * 8.0 * profile.bit_duration;

    switch (mode) {
        case ScanMode::passive_or_idle:
            return {q_pre + q_post + d_s * s.rx_s_i.avg,
                    s.pre_s.duration.avg + d_s + s.post_s.duration.avg};

        case ScanMode::continuous_segment:
            return {d_s * s.rx_s_i.avg + s.chch_s.duration.avg * s.chch_s.current.avg,
                    d_s + s.chch_s.duration.avg};

        case ScanMode::active_with_response: {
            const double d_scan = d_s - s.rxtx_s.duration.avg - d_tx -
                                  s.txrx_s.duration.avg - d_rxsr - s.rxrx_s.duration.avg;
            if (d_scan <= 0.0) {
                std::ostringstream msg;
                msg << "scan window " << d_s << " s is too small for the active handshake ("
                    << (d_s - d_scan) << " s)";
                throw std::invalid_argument(msg.str());
            }
            const double charge = q_pre + d_scan * s.rx_s_i.avg +
                                  s.rxtx_s.duration.avg * s.rxtx_s.current.avg +
                                  d_tx * s.tx_s_i.avg +
                                  s.txrx_s.duration.avg * s.txrx_s.current.avg +
                                  d_rxsr * s.rxsr_i.avg +
                                  s.rxrx_s.duration.avg * s.rxrx_s.current.avg +
                                  q_post + s.crx_s_q.avg + s.ctx_s_q.avg;
            return {charge, s.pre_s.duration.avg + d_s + s.post_s.duration.avg};
        }

        case ScanMode::connect_request: {
            const double charge = q_pre + d_s * s.rx_s_i.avg + d_tx * s.tx_s_i.avg +
                                  s.txrx_s.duration.avg * s.txrx_s.current.avg +
                                  q_post + s.ctx_s_q.avg;
            return {charge, s.pre_s.duration.avg + d_s + d_tx +
                            s.txrx_s.duration.avg + s.post_s.duration.avg};
        }
    }
    throw std::logic_error("unreachable scan mode");
}

/// Timing parameters of a connection establishment or parameter update.
struct ConnSetupParams {
    double transmit_window = 3e-3;         // d_tw
    double transmit_window_offset = 0.0;   // d_two
    double first_packet_offset = 1.5e-3;   // d_p, within the transmit window
    double interval_old = 0.0;             // T_c before an update
    double interval_new = 0.1;             // T_c once established/updated
};

enum class SetupKind { establish, update };

inline void validate(const ConnSetupParams& p, SetupKind kind) {
    const double d_tw_max = std::min(10e-3, p.interval_new - 1.25e-3);
    if (!(p.transmit_window > 1.25e-3 && p.transmit_window <= d_tw_max))
        throw std::invalid_argument(
            "transmit window must be within 1.25 ms .. min(10 ms, T_c_new - 1.25 ms)");
    if (!(p.first_packet_offset >= 0.0 && p.first_packet_offset <= p.transmit_window))
        throw std::invalid_argument("first packet offset must be within 0 .. d_tw");
    if (p.transmit_window_offset < 0.0)
        throw std::invalid_argument("transmit window offset must be >= 0");
    if (kind == SetupKind::update && p.interval_old < 0.0)
        throw std::invalid_argument("the previous interval must be >= 0");
}

/// Transmit-window broadening from clock inaccuracy during establishment.
inline double setup_window_widening_establish(double total_sca_ppm, double d_two) {
    return total_sca_ppm * 1e-6 * (1.25e-3 + d_two);
}

/// Transmit-window broadening during a parameter update.
inline double setup_window_widening_update(double total_sca_ppm, double d_two,
                                           double interval_old) {
    return total_sca_ppm * 1e-6 * (interval_old + d_two);
}

/**
 * Charge of the connection establishment / update procedure, excluding
 * the event the request packet travels in: that event belongs to the
 * discovery accounting (establishment) or is passed in explicitly as
 * `embedded` (update: a connection event carrying the 22-byte request).
 *
 * Master: the request event plus sleeping until its first scheduled
 * packet. Slave: the request event, sleeping until the transmit window,
 * then listening at I_rx until the master's packet, widened by the
 * clock-drift allowance.
 */
inline EventCost connection_setup_cost(const DeviceProfile& profile,
                                       const ConnSetupParams& setup, SetupKind kind,
                                       Role role, EventCost embedded = {}) {
    validate(setup, kind);
    const double i_sl = profile.sleep_current;
    const double i_rx = profile.connected.rx_i.avg;
    const double total_sca = 2.0 * profile.sca_ppm;
    const double d_two = setup.transmit_window_offset;
    const double d_p = setup.first_packet_offset;

    double charge = embedded.charge;
    double duration = embedded.duration;
    if (kind == SetupKind::establish) {
        if (role == Role::master) {
            charge += (1.25e-3 + d_two + d_p) * i_sl;
        } else {
            const double d_ww = setup_window_widening_establish(total_sca, d_two);
            charge += (d_two + 1.25e-3 - d_ww) * i_sl + (d_p + d_ww) * i_rx;
        }
        duration += 1.25e-3 + d_two + d_p;
    } else {
        if (role == Role::master) {
            charge += (setup.interval_old + d_two + d_p - embedded.duration) * i_sl;
        } else {
            const double d_ww = setup_window_widening_update(total_sca, d_two,
                                                             setup.interval_old);
            charge += (setup.interval_old + d_two - d_ww - embedded.duration) * i_sl +
                      (d_p + d_ww) * i_rx;
        }
        duration += setup.interval_old + d_two + d_p - embedded.duration;
    }
    return {charge, duration};
}

/**
 * Transmit-window offset a BLE112 stack picks for a given new connection
 * interval (regressions fitted over ~12000 sniffed connection procedures).
 */
inline double estimate_d_two_ble112(double t_c) {
    if (t_c > 12.5e-3) return t_c - 6.454e-3;
    if (t_c > 7.25e-3) return 0.389 * t_c + 0.484e-3;
    throw std::invalid_argument("d_two estimate is only valid for T_c > 7.25 ms");
}

/// Setup parameters a well-behaved BLE112-like stack typically chooses:
/// d_tw = 3 ms, the anchor in the middle of the window, d_two from the
/// fitted regression (establishment) or zero (update).
inline ConnSetupParams typical_setup_ble112(double t_c_new, double t_c_old = 0.0,
                                            SetupKind kind = SetupKind::establish) {
    ConnSetupParams p;
    p.transmit_window = 3e-3;
    p.first_packet_offset = 1.5e-3;
    p.interval_new = t_c_new;
    p.interval_old = t_c_old;
    p.transmit_window_offset = kind == SetupKind::establish ? estimate_d_two_ble112(t_c_new) : 0.0;
    return p;
}

/// Worst-case setup parameters: maximum window, anchor at its end,
/// maximum offset d_two = T_c_new.
inline ConnSetupParams worst_case_setup(double t_c_new, double t_c_old = 0.0) {
    ConnSetupParams p;
    p.transmit_window = std::min(10e-3, t_c_new - 1.25e-3);
    p.first_packet_offset = p.transmit_window;
    p.transmit_window_offset = t_c_new;
    p.interval_new = t_c_new;
    p.interval_old = t_c_old;
    return p;
}

/// The advertising event a connection request is exchanged in: 37 bytes
/// advertised, a 44-byte connection request received in response.
inline EventCost connection_request_event(const DeviceProfile& profile,
                                          double tx_power_dbm = 3.0) {
    AdvEventParams p;
    p.channels_used = 1;
    p.got_response = true;
    p.response_bytes = 44;
    p.payload_bytes = 37;
    p.tx_power_dbm = tx_power_dbm;
    return advertising_event_cost(profile, p);
}

/// The connection event a parameter-update request is exchanged in:
/// a 22-byte packet from the master, pairs received per payload.
inline EventCost connection_update_event(const DeviceProfile& profile,
                                         const ConnectionParams& params,
                                         int slave_payload_bytes = 0) {
    ConnectionParams update_params = params;
    update_params.role = Role::master;
    return connection_event_cost(profile, update_params,
                                 PacketExchange::uniform(1, slave_payload_bytes, 22));
}

}  // namespace blenergy

#endif  // BLENERGY_EVENTS_HPP
