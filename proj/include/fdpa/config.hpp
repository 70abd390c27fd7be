// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace fdpa {

/// Physical and scenario parameters. Angles of the dB/dBm fields follow the
/// configuration convention: si_cancellation and rician_factor in dB,
/// noise powers in dBm, antenna_gain in dBi. Everything downstream converts
/// to linear units once, in ChannelRealization.
struct SystemConfig {
  double carrier_frequency = 1.9e9;  // Hz
  double bandwidth = 200e3;          // Hz, carried as metadata only
  double pathloss_exponent = 3.6;
  double reference_distance = 30.0;  // m
  double max_distance = 250.0;       // m
  double si_cancellation = -80.0;    // dB, negative
  double noise_power_dl = -83.0;     // dBm per downlink user
  double noise_power_ul = -110.0;    // dBm at the BS
  double antenna_gain = 10.0;        // dBi, BS<->user links only
  double rician_factor = 5.0;        // dB, SI channel fading
  int num_antennas = 10;             // N_T
  int num_dl_users = 3;              // K
  int num_ul_users = 8;              // J

  // dB targets; size 1 broadcasts to all users of that direction.
  std::vector<double> sinr_target_dl = {10.0};
  std::vector<double> sinr_target_ul = {6.0};

  double sinr_target_dl_linear(int k) const;
  double sinr_target_ul_linear(int j) const;
  double noise_dl_watts() const;
  double noise_ul_watts() const;
};

struct SweepConfig {
  double lambda_step = 0.01;
  int num_drops = 100;
  std::uint64_t master_seed = 1;
  std::vector<int> nt_list = {8, 10, 12};
  std::vector<double> sinr_dl_sweep = {2, 4, 6, 8, 10, 12, 14};  // dB
};

/// Collects every violated invariant, not just the first. Empty means valid.
std::vector<std::string> validate(const SystemConfig& cfg);
std::vector<std::string> validate(const SweepConfig& cfg);

/// Flat `key = value` configuration files, `#` starts a comment.
/// Keys are exactly the SystemConfig/SweepConfig field names; list-valued
/// fields take comma-separated values. Unknown keys are an error.
struct ConfigError {
  std::string message;
};

void apply_config_key(SystemConfig& sys, SweepConfig& sweep,
                      const std::string& key, const std::string& value);
void load_config_file(const std::string& path, SystemConfig& sys,
                      SweepConfig& sweep);
void load_config_stream(std::istream& in, SystemConfig& sys,
                        SweepConfig& sweep, const std::string& origin);

/// Textual dump in the same key=value format (used by run manifests).
std::string dump_config(const SystemConfig& sys, const SweepConfig& sweep);

}  // namespace fdpa
