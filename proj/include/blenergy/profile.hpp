/**
 * Device profiles: measured per-phase durations, currents and charge
 * offsets of one BLE transceiver, plus device constants (sleep current,
 * sleep clock accuracy, interframe space, bit duration).
 *
 * Profiles are data, not code. They are loaded from a small JSON schema
 * (documented in the README) whose numbers mirror the usual datasheet
 * units: ms for durations, mA for currents, uC for charge offsets.
 * Everything is converted to SI (seconds, amperes, coulombs) on load.
 */
#ifndef BLENERGY_PROFILE_HPP
#define BLENERGY_PROFILE_HPP

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace blenergy {

struct parse_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct validation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// avg/min/max/std of one quantity (a duration, a current or a charge),
/// always in SI units. min <= avg <= max and std >= 0.
struct PhaseStats {
    double avg = 0.0;
    double min = 0.0;
    double max = 0.0;
    double std = 0.0;

    double spread() const { return max - min; }
};

/// A phase that has both a duration and a current statistic.
struct PhasePair {
    PhaseStats duration;  // seconds
    PhaseStats current;   // amperes
};

/// Connected-mode phase table (one row per phase of a connection event).
struct ConnectedPhaseTable {
    PhasePair head, pre, cpre, rxtx, txrx, tra, post, tail;
    PhaseStats pretx_d, prerx_d;  // duration-only correction offsets
    PhaseStats rx_i, tx_i;        // current-only (durations are payload-driven)
    PhaseStats to_q;              // per-packet-pair charge offset, may be negative
    // Effective d_prerx for the first rx-phase of a slave's connection event.
    double slave_first_prerx = 0.0;  // seconds
};

/// Scan-event phase table.
struct ScanPhaseTable {
    PhasePair pre_s, rxtx_s, txrx_s, rxrx_s, post_s, chch_s;
    PhaseStats rx_s_i, tx_s_i, rxsr_i;  // current-only
    PhaseStats pretx_s_d, prerx_s_d;    // duration-only
    PhaseStats ctx_s_q, crx_s_q;        // charge offsets, may be negative
};

struct TxPowerEntry {
    double dbm = 0.0;
    double current = 0.0;  // amperes
};

struct DeviceProfile {
    std::string name;
    ConnectedPhaseTable connected;
    ScanPhaseTable scan;
    std::vector<TxPowerEntry> tx_power;  // ordered by dbm ascending
    double sleep_current = 0.0;          // I_sl, amperes
    double sca_ppm = 0.0;                // sleep clock accuracy
    double ifs = 0.0;                    // interframe space, seconds
    double bit_duration = 0.0;           // seconds per over-the-air bit

    /// Duration of one advertising packet slot: 37 payload bytes on air
    /// plus the interframe space the advertiser listens for a response.
    double adv_packet_duration() const { return 37.0 * 8.0 * bit_duration + ifs; }

    /// Duration of hopping to the next advertising channel.
    double channel_change_duration() const { return ifs; }
};

/// Exact-match lookup of the transmission-phase current for a tx-power
/// level; the table holds the discrete device-supported levels only,
/// so no interpolation is done.
inline double tx_current(const DeviceProfile& profile, double tx_power_dbm) {
    for (const auto& e : profile.tx_power) {
        if (std::abs(e.dbm - tx_power_dbm) < 1e-9) return e.current;
    }
    std::ostringstream msg;
    msg << "unknown tx-power level " << tx_power_dbm << " dBm; available:";
    for (const auto& e : profile.tx_power) msg << ' ' << e.dbm;
    throw std::invalid_argument(msg.str());
}

namespace detail {

inline void check(bool ok, const std::string& what) {
    if (!ok) throw validation_error(what);
}

inline void validate_stats(const PhaseStats& s, const std::string& field) {
    check(s.min <= s.avg && s.avg <= s.max,
          "profile field '" + field + "' violates min <= avg <= max");
    check(s.std >= 0.0, "profile field '" + field + "' violates std >= 0");
}

}  // namespace detail

inline void validate(const DeviceProfile& p) {
    using detail::check;
    using detail::validate_stats;

    const struct { const char* name; const PhasePair* pair; } conn_pairs[] = {
        {"connected.head", &p.connected.head}, {"connected.pre", &p.connected.pre},
        {"connected.cpre", &p.connected.cpre}, {"connected.rxtx", &p.connected.rxtx},
        {"connected.txrx", &p.connected.txrx}, {"connected.tra", &p.connected.tra},
        {"connected.post", &p.connected.post}, {"connected.tail", &p.connected.tail},
    };
    for (const auto& [name, pair] : conn_pairs) {
        validate_stats(pair->duration, std::string(name) + ".d");
        validate_stats(pair->current, std::string(name) + ".i");
    }
    validate_stats(p.connected.pretx_d, "connected.pretx.d");
    validate_stats(p.connected.prerx_d, "connected.prerx.d");
    validate_stats(p.connected.rx_i, "connected.rx.i");
    validate_stats(p.connected.tx_i, "connected.tx.i");
    validate_stats(p.connected.to_q, "connected.to.q");
    check(p.connected.slave_first_prerx > 0.0, "slave_first_prerx_us must be > 0");

    const struct { const char* name; const PhasePair* pair; } scan_pairs[] = {
        {"scan.pre_s", &p.scan.pre_s},   {"scan.rxtx_s", &p.scan.rxtx_s},
        {"scan.txrx_s", &p.scan.txrx_s}, {"scan.rxrx_s", &p.scan.rxrx_s},
        {"scan.post_s", &p.scan.post_s}, {"scan.chch_s", &p.scan.chch_s},
    };
    for (const auto& [name, pair] : scan_pairs) {
        validate_stats(pair->duration, std::string(name) + ".d");
        validate_stats(pair->current, std::string(name) + ".i");
    }
    validate_stats(p.scan.rx_s_i, "scan.rx_s.i");
    validate_stats(p.scan.tx_s_i, "scan.tx_s.i");
    validate_stats(p.scan.rxsr_i, "scan.rxsr.i");
    validate_stats(p.scan.pretx_s_d, "scan.pretx_s.d");
    validate_stats(p.scan.prerx_s_d, "scan.prerx_s.d");
    validate_stats(p.scan.ctx_s_q, "scan.ctx_s.q");
    validate_stats(p.scan.crx_s_q, "scan.crx_s.q");

    check(!p.tx_power.empty(), "tx_power_table must not be empty");
    for (std::size_t i = 0; i < p.tx_power.size(); ++i) {
        check(p.tx_power[i].current > 0.0, "tx_power_table current must be > 0");
        if (i > 0) {
            check(p.tx_power[i - 1].dbm < p.tx_power[i].dbm,
                  "tx_power_table must be ordered by dbm");
            check(p.tx_power[i - 1].current <= p.tx_power[i].current,
                  "tx_power_table current must be non-decreasing with tx-power");
        }
    }

    check(p.sleep_current > 0.0, "sleep_current_uA must be > 0");
    check(p.sca_ppm >= 0.0, "sca_ppm must be >= 0");
    check(p.ifs > 0.0, "ifs_us must be > 0");
    check(p.bit_duration > 0.0, "bit_us must be > 0");
}

namespace detail {

// Unit scales between the file schema (ms / mA / uC) and SI.
constexpr double kMs = 1e-3;
constexpr double kMa = 1e-3;
constexpr double kUc = 1e-6;

inline PhaseStats stats_from_json(const nlohmann::json& j, double scale,
                                  const std::string& field) {
    for (const char* k : {"avg", "min", "max", "std"}) {
        if (!j.contains(k))
            throw parse_error("profile field '" + field + "' is missing '" + k + "'");
    }
    PhaseStats s;
    s.avg = j.at("avg").get<double>() * scale;
    s.min = j.at("min").get<double>() * scale;
    s.max = j.at("max").get<double>() * scale;
    s.std = j.at("std").get<double>() * scale;
    return s;
}

inline nlohmann::json stats_to_json(const PhaseStats& s, double scale) {
    return {{"avg", s.avg / scale}, {"min", s.min / scale},
            {"max", s.max / scale}, {"std", s.std / scale}};
}

inline const nlohmann::json& phase_entry(const nlohmann::json& phases,
                                         const std::string& name) {
    if (!phases.contains(name))
        throw parse_error("profile is missing phase '" + name + "'");
    return phases.at(name);
}

inline PhasePair pair_from_json(const nlohmann::json& phases, const std::string& name) {
    const auto& e = phase_entry(phases, name);
    if (!e.contains("d") || !e.contains("i"))
        throw parse_error("phase '" + name + "' needs both 'd' and 'i' entries");
    return {stats_from_json(e.at("d"), kMs, name + ".d"),
            stats_from_json(e.at("i"), kMa, name + ".i")};
}

inline PhaseStats single_from_json(const nlohmann::json& phases, const std::string& name,
                                   const char* key, double scale) {
    const auto& e = phase_entry(phases, name);
    if (!e.contains(key))
        throw parse_error("phase '" + name + "' needs a '" + std::string(key) + "' entry");
    return stats_from_json(e.at(key), scale, name + "." + key);
}

}  // namespace detail

inline DeviceProfile load_profile_from_json(const nlohmann::json& j) {
    using namespace detail;
    DeviceProfile p;
    try {
        p.name = j.at("name").get<std::string>();

        const auto& c = j.at("connected_phases");
        p.connected.head = pair_from_json(c, "head");
        p.connected.pre = pair_from_json(c, "pre");
        p.connected.cpre = pair_from_json(c, "cpre");
        p.connected.rxtx = pair_from_json(c, "rxtx");
        p.connected.txrx = pair_from_json(c, "txrx");
        p.connected.tra = pair_from_json(c, "tra");
        p.connected.post = pair_from_json(c, "post");
        p.connected.tail = pair_from_json(c, "tail");
        p.connected.pretx_d = single_from_json(c, "pretx", "d", kMs);
        p.connected.prerx_d = single_from_json(c, "prerx", "d", kMs);
        p.connected.rx_i = single_from_json(c, "rx", "i", kMa);
        p.connected.tx_i = single_from_json(c, "tx", "i", kMa);
        p.connected.to_q = single_from_json(c, "to", "q", kUc);

        const auto& s = j.at("scan_phases");
        p.scan.pre_s = pair_from_json(s, "pre_s");
        p.scan.rxtx_s = pair_from_json(s, "rxtx_s");
        p.scan.txrx_s = pair_from_json(s, "txrx_s");
        p.scan.rxrx_s = pair_from_json(s, "rxrx_s");
        p.scan.post_s = pair_from_json(s, "post_s");
        p.scan.chch_s = pair_from_json(s, "chch_s");
        p.scan.rx_s_i = single_from_json(s, "rx_s", "i", kMa);
        p.scan.tx_s_i = single_from_json(s, "tx_s", "i", kMa);
        p.scan.rxsr_i = single_from_json(s, "rxsr", "i", kMa);
        p.scan.pretx_s_d = single_from_json(s, "pretx_s", "d", kMs);
        p.scan.prerx_s_d = single_from_json(s, "prerx_s", "d", kMs);
        p.scan.ctx_s_q = single_from_json(s, "ctx_s", "q", kUc);
        p.scan.crx_s_q = single_from_json(s, "crx_s", "q", kUc);

        for (const auto& e : j.at("tx_power_table")) {
            p.tx_power.push_back({e.at("dbm").get<double>(),
                                  e.at("i_ma").get<double>() * kMa});
        }
        std::sort(p.tx_power.begin(), p.tx_power.end(),
                  [](const TxPowerEntry& a, const TxPowerEntry& b) { return a.dbm < b.dbm; });

        p.sleep_current = j.at("sleep_current_uA").get<double>() * 1e-6;
        p.sca_ppm = j.at("sca_ppm").get<double>();
        p.ifs = j.at("ifs_us").get<double>() * 1e-6;
        p.bit_duration = j.at("bit_us").get<double>() * 1e-6;
        p.connected.slave_first_prerx = j.at("slave_first_prerx_us").get<double>() * 1e-6;
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("malformed profile: ") + e.what());
    }

    validate(p);
    return p;
}

inline DeviceProfile load_profile_from_string(std::string_view text) {
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded()) throw parse_error("profile is not valid JSON");
    return load_profile_from_json(j);
}

inline DeviceProfile load_profile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open profile file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_profile_from_string(buf.str());
}

inline nlohmann::json profile_to_json(const DeviceProfile& p) {
    using namespace detail;
    nlohmann::json c;
    auto put_pair = [&](nlohmann::json& dst, const char* name, const PhasePair& pp) {
        dst[name] = {{"d", stats_to_json(pp.duration, kMs)},
                     {"i", stats_to_json(pp.current, kMa)}};
    };
    put_pair(c, "head", p.connected.head);
    put_pair(c, "pre", p.connected.pre);
    put_pair(c, "cpre", p.connected.cpre);
    put_pair(c, "rxtx", p.connected.rxtx);
    put_pair(c, "txrx", p.connected.txrx);
    put_pair(c, "tra", p.connected.tra);
    put_pair(c, "post", p.connected.post);
    put_pair(c, "tail", p.connected.tail);
    c["pretx"] = {{"d", stats_to_json(p.connected.pretx_d, kMs)}};
    c["prerx"] = {{"d", stats_to_json(p.connected.prerx_d, kMs)}};
    c["rx"] = {{"i", stats_to_json(p.connected.rx_i, kMa)}};
    c["tx"] = {{"i", stats_to_json(p.connected.tx_i, kMa)}};
    c["to"] = {{"q", stats_to_json(p.connected.to_q, kUc)}};

    nlohmann::json s;
    put_pair(s, "pre_s", p.scan.pre_s);
    put_pair(s, "rxtx_s", p.scan.rxtx_s);
    put_pair(s, "txrx_s", p.scan.txrx_s);
    put_pair(s, "rxrx_s", p.scan.rxrx_s);
    put_pair(s, "post_s", p.scan.post_s);
    put_pair(s, "chch_s", p.scan.chch_s);
    s["rx_s"] = {{"i", stats_to_json(p.scan.rx_s_i, kMa)}};
    s["tx_s"] = {{"i", stats_to_json(p.scan.tx_s_i, kMa)}};
    s["rxsr"] = {{"i", stats_to_json(p.scan.rxsr_i, kMa)}};
    s["pretx_s"] = {{"d", stats_to_json(p.scan.pretx_s_d, kMs)}};
    s["prerx_s"] = {{"d", stats_to_json(p.scan.prerx_s_d, kMs)}};
    s["ctx_s"] = {{"q", stats_to_json(p.scan.ctx_s_q, kUc)}};
    s["crx_s"] = {{"q", stats_to_json(p.scan.crx_s_q, kUc)}};

    nlohmann::json tx = nlohmann::json::array();
    for (const auto& e : p.tx_power)
        tx.push_back({{"dbm", e.dbm}, {"i_ma", e.current / kMa}});

    return {{"name", p.name},
            {"units", {{"d", "ms"}, {"i", "mA"}, {"q", "uC"}}},
            {"connected_phases", c},
            {"scan_phases", s},
            {"tx_power_table", tx},
            {"sleep_current_uA", p.sleep_current / 1e-6},
            {"sca_ppm", p.sca_ppm},
            {"ifs_us", p.ifs / 1e-6},
            {"bit_us", p.bit_duration / 1e-6},
            {"slave_first_prerx_us", p.connected.slave_first_prerx / 1e-6}};
}

inline std::string serialize_profile(const DeviceProfile& p) {
    return profile_to_json(p).dump(2) + "\n";
}

inline void save_profile(const DeviceProfile& p, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write profile file '" + path + "'");
    out << serialize_profile(p);
}

}  // namespace blenergy

#endif  // BLENERGY_PROFILE_HPP
