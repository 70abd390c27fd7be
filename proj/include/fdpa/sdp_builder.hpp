// SPDX-License-Identifier: Apache-2.0
//
// Lifts the three power-allocation problems into relaxed conic form
// (rank constraints dropped). All rows are normalized so constant terms are
// O(1); noise powers span 1e-14..1e-11 W and would otherwise wreck the
// solver conditioning.

#pragma once

#include <Eigen/Dense>

#include "fdpa/channel.hpp"
#include "fdpa/conic.hpp"
#include "fdpa/config.hpp"
#include "fdpa/zf.hpp"

namespace fdpa {

/// Linear-scale per-user SINR requirements.
struct Targets {
  Eigen::VectorXd gamma_dl;  // K
  Eigen::VectorXd gamma_ul;  // J

  static Targets from_config(const SystemConfig& cfg);
};

struct TchebyParams {
  Eigen::Vector2d lambda;  // weights, nonnegative, sum to 1 within 1e-12
  Eigen::Vector2d q_star;  // anchor objective values, watts

  void check() const;  // throws std::invalid_argument on violation
};

/// Total downlink transmit power minimization (objective sum_k Tr W_k).
ConicProblem build_problem1(const ChannelRealization& ch, const ReceiveBank& bank,
                            const Targets& targets);

/// Total uplink transmit power minimization (objective sum_j P_j).
ConicProblem build_problem2(const ChannelRealization& ch, const ReceiveBank& bank,
                            const Targets& targets);

/// Weighted-Tchebycheff scalarization in epigraph form (objective t).
ConicProblem build_problem3(const ChannelRealization& ch, const ReceiveBank& bank,
                            const Targets& targets, const TchebyParams& tcheby);

}  // namespace fdpa
