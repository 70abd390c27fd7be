// SPDX-License-Identifier: Apache-2.0
//
// Decibel / dBm / watt conversions. All internal computation runs in linear
// units (watts, amplitude ratios); dB and dBm appear only at configuration
// and reporting boundaries.

#pragma once

#include <cmath>

namespace fdpa {

inline double db_to_linear(double x_db) { return std::pow(10.0, x_db / 10.0); }

inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

inline double dbm_to_watts(double x_dbm) {
  return std::pow(10.0, (x_dbm - 30.0) / 10.0);
}

inline double watts_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

}  // namespace fdpa
