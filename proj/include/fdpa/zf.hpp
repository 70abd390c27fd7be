// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "fdpa/channel.hpp"

namespace fdpa {

/// Zero-forcing uplink receive bank: v_j is the conjugated j-th row of the
/// Moore-Penrose pseudoinverse of Q = [g_1, ..., g_J], so g_r^H v_j = delta_rj.
struct ReceiveBank {
  std::vector<Eigen::VectorXcd> v;  // J receive beamformers, length N_T
  Eigen::MatrixXcd q;               // N_T x J stacked uplink channels
  Eigen::MatrixXcd q_pinv;          // J x N_T
};

/// Candidate transmit solution. Either the beamformer vectors w or the lifted
/// matrices W (or both) may be populated; SINR evaluation prefers the lifted
/// form when present so that un-certified relaxed solutions never go through
/// a premature rank-one extraction.
struct CandidateSolution {
  std::vector<Eigen::VectorXcd> w;  // K beamformers
  std::vector<Eigen::MatrixXcd> w_lifted;  // K Hermitian matrices
  Eigen::VectorXd p;                // J uplink powers, watts

  bool has_lifted() const { return !w_lifted.empty(); }
};

/// SVD-based pseudoinverse with a condition-number guard: singular-value
/// ratio above 1e12 throws std::runtime_error("degenerate uplink channels").
ReceiveBank build_zf(const std::vector<Eigen::VectorXcd>& g);

Eigen::VectorXd sinr_downlink(const ChannelRealization& ch,
                              const CandidateSolution& sol);

Eigen::VectorXd sinr_uplink(const ChannelRealization& ch,
                            const ReceiveBank& bank,
                            const CandidateSolution& sol);

}  // namespace fdpa
