// SPDX-License-Identifier: Apache-2.0
//
// Monte Carlo channel generation: user placement, distance-dependent path
// loss anchored at free-space loss of the reference distance, Rayleigh
// fading on BS<->user and user<->user links, and a Rician self-interference
// channel scaled by the SI cancellation factor.

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "fdpa/config.hpp"
#include "fdpa/rng.hpp"

namespace fdpa {

struct PolarPosition {
  double radius = 0.0;  // m
  double angle = 0.0;   // rad
};

struct UserLayout {
  std::vector<PolarPosition> dl_positions;  // K
  std::vector<PolarPosition> ul_positions;  // J
};

struct ChannelRealization {
  std::vector<Eigen::VectorXcd> h;  // K downlink channels, length N_T
  std::vector<Eigen::VectorXcd> g;  // J uplink channels, length N_T
  Eigen::MatrixXcd f;               // J x K inter-user channels
  Eigen::MatrixXcd h_si;            // N_T x N_T self-interference channel
  Eigen::VectorXd sigma2_dl;        // K noise variances, watts
  double sigma2_ul = 0.0;           // watts

  int nt() const { return h.empty() ? static_cast<int>(h_si.rows()) : static_cast<int>(h[0].size()); }
  int num_dl() const { return static_cast<int>(h.size()); }
  int num_ul() const { return static_cast<int>(g.size()); }
};

/// Path loss in dB at `distance`. Free-space loss at the reference distance,
/// then the configured exponent; BS links subtract the BS antenna gain once.
/// Throws std::domain_error below the reference distance.
double path_loss_db(double distance, const SystemConfig& cfg, bool bs_link);

/// Euclidean distance between two polar positions (shared origin at the BS).
double user_distance(const PolarPosition& a, const PolarPosition& b);

UserLayout draw_layout(const SystemConfig& cfg, StreamRng& rng);

ChannelRealization generate(const UserLayout& layout, const SystemConfig& cfg,
                            std::uint64_t master_seed, std::uint64_t drop_index);

/// Layout + generate with streams derived from (master_seed, drop_index).
ChannelRealization draw_realization(const SystemConfig& cfg,
                                    std::uint64_t master_seed,
                                    std::uint64_t drop_index);

/// Self-describing text dump: one header line `name rows cols`, then rows of
/// comma-separated `re,im` pairs per entry (whitespace between entries).
void dump_realization(std::ostream& os, const ChannelRealization& ch);

}  // namespace fdpa
