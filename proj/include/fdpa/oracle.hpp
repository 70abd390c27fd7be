// SPDX-License-Identifier: Apache-2.0
//
// Independent cross-checks of the lifted-solve path. The brute-force search
// evaluates feasibility directly through the SINR definitions and never
// touches the builder/solver/recovery chain it is checking.

#pragma once

#include <Eigen/Dense>
#include <string>

#include "fdpa/moop.hpp"
#include "fdpa/sdp_builder.hpp"

namespace fdpa {

/// The hand-solvable instance: N_T=2, K=J=1, h=(1,0), g=(0,1), |f|^2=0.1,
/// H_SI=I, unit noise, unit linear targets. Optimal beamformer aligns with h,
/// the SI term vanishes, and every weight yields dl=1.1 W, ul=1.0 W.
struct DecoupledInstance {
  ChannelRealization ch;
  ReceiveBank bank;
  Targets targets;
};
DecoupledInstance make_decoupled_instance();

struct DecoupledCheck {
  double expected_dl = 1.1;
  double expected_ul = 1.0;
  double max_dl_dev = 0.0;  // relative
  double max_ul_dev = 0.0;
  int points = 0;
  bool passed = false;
  std::string note;
};
DecoupledCheck run_decoupled_oracle(double lambda_step = 0.25,
                                    const SolverOptions& opts = {});

/// Coarse-to-fine grid search over w = beta (cos phi, sin phi e^{i psi}) and
/// the uplink power P for an N_T=2, K=1, J=1 instance. Refinement passes
/// shrink the window around the best cells; the effective resolution exceeds
/// 200 points per dimension.
struct BruteForceOptions {
  int grid = 21;
  int passes = 4;
  int keep = 6;          // cells refined per pass
  double range_safety = 4.0;
};

struct BruteForceResult {
  bool feasible = false;
  double objective = 0.0;  // scalarized value
  double q1 = 0.0;         // ||w||^2 at the best point
  double q2 = 0.0;         // P at the best point
};

BruteForceResult brute_force_tcheby(const ChannelRealization& ch,
                                    const ReceiveBank& bank,
                                    const Targets& targets,
                                    const Eigen::Vector2d& lambda,
                                    const Eigen::Vector2d& q_star,
                                    const BruteForceOptions& opts = {});

/// Random small instance for the grid-search comparison.
ChannelRealization make_small_instance(std::uint64_t seed);

}  // namespace fdpa
