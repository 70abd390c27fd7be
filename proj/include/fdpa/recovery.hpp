// SPDX-License-Identifier: Apache-2.0
//
// Rank-one beamformer extraction from relaxed solutions and numerical
// verification of the optimality certificates (dual signs, complementary
// slackness, stationarity, positive-definite reduced multiplier, rank of the
// PSD dual block).

#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "fdpa/conic.hpp"
#include "fdpa/sdp_builder.hpp"
#include "fdpa/solver.hpp"
#include "fdpa/zf.hpp"

namespace fdpa {

struct RecoveryReport {
  std::vector<Eigen::VectorXcd> w;   // principal-eigenpair beamformers
  Eigen::VectorXd p;                 // copied uplink powers
  std::vector<double> eigen_ratio;   // lambda_2 / lambda_1 per block
  std::vector<int> w_rank;           // numerical rank; 0 for near-zero blocks
  double eigen_ratio_max = 0.0;      // over nonzero blocks
  bool rank_one_ok = true;           // every nonzero block within 1e-3
  double dl_power = 0.0;             // sum ||w_k||^2, watts
  double ul_power = 0.0;             // sum P_j, watts
  std::string message;
};

struct KktCheck {
  bool passed = true;
  std::string failure;        // names the first violated condition
  double dual_sign_min = 0.0; // min over xi, psi, theta and eigs of Y_k
  double complementarity_max = 0.0;  // max_k ||Y_k W_k||_F / (1 + ||W_k||_F)
  double stationarity_max = 0.0;     // max_k ||Y_k - (R_k - xi_k H_k/G_k)||_F/(1+||R_k||_F)
  double r_min_eig = 0.0;            // min_k lambda_min(R_k)
  std::vector<int> y_rank;           // numerical rank of Y_k
  std::vector<double> r_k_min_eig;   // per-block lambda_min(R_k)
  double theta_sum_err = 0.0;        // |theta_1 + theta_2 - 1| (has_t only)
  bool theta_sum_ok = true;          // theta_sum_err <= 1e-7
};

/// Eigenvalue threshold for numerical rank: > 1e-6 * lambda_max.
int numerical_rank(const Eigen::MatrixXcd& a, double rel_tol = 1e-6);

/// Blocks with Tr(W_k) < 1e-12 * total power are reported rank-0 and skipped
/// by the rank-one statistics. Ratios above 1e-3 set rank_one_ok = false;
/// there is no randomization fallback.
RecoveryReport extract(const SolverResult& result);

KktCheck verify_kkt(const SolverResult& result, const ConicProblem& prob);

struct EvaluationReport {
  Eigen::VectorXd sinr_dl, sinr_ul;      // achieved linear SINRs
  Eigen::VectorXd margin_dl, margin_ul;  // sinr/target - 1
  bool feasible = true;                  // margins >= -1e-6
};

EvaluationReport evaluate(const ChannelRealization& ch, const ReceiveBank& bank,
                          const RecoveryReport& report, const Targets& targets);

/// Line-oriented certificate summary (one metric per line) for CI use.
std::string certificate_summary(const KktCheck& check);

}  // namespace fdpa
