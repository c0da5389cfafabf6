/// Bundled profile for the Bluegiga BLE112 (TI CC2540 based) at 3 dBm,
/// the device the reference measurements were taken on. The same text
/// ships as data/ble112.profile.
#ifndef BLENERGY_BLE112_HPP
#define BLENERGY_BLE112_HPP

#include <string_view>

#include "profile.hpp"

namespace blenergy {

inline constexpr std::string_view ble112_profile_json = R"({
  "name": "BLE112",
  "units": { "d": "ms", "i": "mA", "q": "uC" },
  "connected_phases": {
    "head":  { "d": { "avg": 0.578, "min": 0.500, "max": 0.640, "std": 0.012 },
               "i": { "avg": 5.924, "min": 5.558, "max": 6.165, "std": 0.085 } },
    "pre":   { "d": { "avg": 0.305, "min": 0.010, "max": 0.450, "std": 0.109 },
               "i": { "avg": 7.691, "min": 5.570, "max": 7.997, "std": 0.153 } },
    "rx":    { "i": { "avg": 26.505, "min": 25.967, "max": 27.676, "std": 0.302 } },
    "rxtx":  { "d": { "avg": 0.080, "min": 0.060, "max": 0.100, "std": 0.004 },
               "i": { "avg": 14.128, "min": 13.793, "max": 14.653, "std": 0.115 } },
    "tx":    { "i": { "avg": 36.445, "min": 35.571, "max": 38.763, "std": 0.559 } },
    "pretx": { "d": { "avg": 0.053, "min": 0.014, "max": 0.084, "std": 0.018 } },
    "txrx":  { "d": { "avg": 0.057, "min": 0.040, "max": 0.070, "std": 0.005 },
               "i": { "avg": 15.125, "min": 14.605, "max": 16.048, "std": 0.198 } },
    "cpre":  { "d": { "avg": 0.073, "min": 0.050, "max": 0.080, "std": 0.004 },
               "i": { "avg": 12.238, "min": 11.633, "max": 13.006, "std": 0.200 } },
    "prerx": { "d": { "avg": 0.123, "min": 0.110, "max": 0.140, "std": 0.005 } },
    "tra":   { "d": { "avg": 0.066, "min": 0.040, "max": 0.090, "std": 0.011 },
               "i": { "avg": 11.636, "min": 8.964, "max": 14.721, "std": 1.416 } },
    "post":  { "d": { "avg": 0.860, "min": 0.610, "max": 1.110, "std": 0.101 },
               "i": { "avg": 7.980, "min": 7.919, "max": 8.221, "std": 0.065 } },
    "tail":  { "d": { "avg": 0.080, "min": 0.060, "max": 0.340, "std": 0.013 },
               "i": { "avg": 4.129, "min": 3.088, "max": 6.995, "std": 0.380 } },
    "to":    { "q": { "avg": -1.2, "min": -1.8, "max": -0.8, "std": 0.2 } }
  },
  "scan_phases": {
    "pre_s":   { "d": { "avg": 0.700, "min": 0.680, "max": 0.730, "std": 0.010 },
                 "i": { "avg": 7.087, "min": 6.924, "max": 7.253, "std": 0.065 } },
    "rx_s":    { "i": { "avg": 26.399, "min": 26.042, "max": 26.480, "std": 0.043 } },
    "rxtx_s":  { "d": { "avg": 0.115, "min": 0.110, "max": 0.120, "std": 0.000498 },
                 "i": { "avg": 15.011, "min": 14.617, "max": 15.519, "std": 0.288 } },
    "tx_s":    { "i": { "avg": 35.999, "min": 35.650, "max": 36.488, "std": 0.247 } },
    "pretx_s": { "d": { "avg": 0.014, "min": 0.004, "max": 0.024, "std": 0.001184 } },
    "txrx_s":  { "d": { "avg": 0.089, "min": 0.080, "max": 0.090, "std": 0.002332 },
                 "i": { "avg": 16.670, "min": 15.875, "max": 17.224, "std": 0.244 } },
    "rxsr":    { "i": { "avg": 26.426, "min": 26.279, "max": 26.563, "std": 0.058 } },
    "prerx_s": { "d": { "avg": 0.074, "min": 0.068, "max": 0.088, "std": 0.00245 } },
    "rxrx_s":  { "d": { "avg": 0.377, "min": 0.370, "max": 0.380, "std": 0.004488 },
                 "i": { "avg": 9.633, "min": 9.426, "max": 9.768, "std": 0.11 } },
    "post_s":  { "d": { "avg": 0.816, "min": 0.710, "max": 1.820, "std": 0.246 },
                 "i": { "avg": 8.012, "min": 7.820, "max": 8.138, "std": 0.060 } },
    "chch_s":  { "d": { "avg": 1.325, "min": 1.320, "max": 1.330, "std": 0.004983 },
                 "i": { "avg": 8.550, "min": 8.470, "max": 8.624, "std": 0.042 } },
    "ctx_s":   { "q": { "avg": -0.2264, "min": -0.3244, "max": -0.1456, "std": 0.0143 } },
    "crx_s":   { "q": { "avg": -0.1350, "min": -0.1900, "max": -0.0851, "std": 0.0123 } }
  },
  "tx_power_table": [
    { "dbm": -23, "i_ma": 26.3 },
    { "dbm": -21, "i_ma": 27.5 },
    { "dbm": -19, "i_ma": 27.5 },
    { "dbm": -17, "i_ma": 27.6 },
    { "dbm": -15, "i_ma": 27.7 },
    { "dbm": -12, "i_ma": 27.9 },
    { "dbm": -10, "i_ma": 28.1 },
    { "dbm": -8,  "i_ma": 28.4 },
    { "dbm": -6,  "i_ma": 28.8 },
    { "dbm": -5,  "i_ma": 29.1 },
    { "dbm": -3,  "i_ma": 30.1 },
    { "dbm": -2,  "i_ma": 30.6 },
    { "dbm": -1,  "i_ma": 31.5 },
    { "dbm": 0,   "i_ma": 32.1 },
    { "dbm": 2,   "i_ma": 33.5 },
    { "dbm": 3,   "i_ma": 36.5 }
  ],
  "sleep_current_uA": 0.9,
  "sca_ppm": 50,
  "ifs_us": 150,
  "bit_us": 1,
  "slave_first_prerx_us": 388
}
)";

/// The bundled BLE112 profile, parsed and validated.
inline DeviceProfile ble112_profile() {
    return load_profile_from_string(ble112_profile_json);
}

}  // namespace blenergy

#endif  // BLENERGY_BLE112_HPP
