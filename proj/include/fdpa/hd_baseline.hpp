// SPDX-License-Identifier: Apache-2.0
//
// Half-duplex comparison arm: SINR targets mapped through the equal-rate
// rule, downlink-only SDP without CCI/SI, uplink MMSE power control via the
// standard-interference-function fixed point, and transmit powers halved for
// the two equal-length intervals.

#pragma once

#include <Eigen/Dense>
#include <string>

#include "fdpa/moop.hpp"
#include "fdpa/recovery.hpp"
#include "fdpa/sdp_builder.hpp"

namespace fdpa {

/// gamma -> (1 + gamma)^2 - 1 on linear ratios, so that a half-duplex slot
/// carries the same rate: log2(1+g) = 0.5 * log2(1+map(g)).
double map_sinr_hd(double gamma_linear);

struct HdDownlink {
  SolveStatus status = SolveStatus::numerical_failure;
  double power = 0.0;  // sum ||w_k||^2 before halving, watts
  RecoveryReport recovery;
  bool ok = false;
};

struct HdUplink {
  Eigen::VectorXd p;  // watts, before halving
  bool converged = false;
  int iterations = 0;
};

struct HdPoint {
  double dl_power = 0.0;  // halved, watts
  double ul_power = 0.0;  // halved, watts
  Eigen::VectorXd dl_sinr_target_hd;  // linear, mapped
  Eigen::VectorXd ul_sinr_target_hd;  // linear, mapped
  bool feasible = false;
  std::string note;
};

/// Reuses the lifted builder/solver with the uplink side removed; H_SI and f
/// never enter.
HdDownlink solve_hd_downlink(const ChannelRealization& ch,
                             const Eigen::VectorXd& gamma_dl_hd,
                             const SolverOptions& opts = {},
                             CertificateStats* stats = nullptr);

/// One update of the standard interference function with the power-dependent
/// MMSE receiver; exposed so the monotonicity of the iteration is testable.
Eigen::VectorXd hd_uplink_iteration(const ChannelRealization& ch,
                                    const Eigen::VectorXd& gamma_ul_hd,
                                    const Eigen::VectorXd& p);

/// Fixed point from P = 0; relative update < 1e-10 terminates, iterates
/// above 1e6 W or 1e4 iterations are declared infeasible.
HdUplink solve_hd_uplink(const ChannelRealization& ch,
                         const Eigen::VectorXd& gamma_ul_hd);

HdPoint hd_point(const ChannelRealization& ch, const Targets& fd_targets,
                 const SolverOptions& opts = {},
                 CertificateStats* stats = nullptr);

}  // namespace fdpa
