// SPDX-License-Identifier: Apache-2.0
//
// Primal-dual interior-point solver for the relaxed problems: Hermitian PSD
// blocks, a nonnegative orthant, and an optional free scalar, in a
// homogeneous self-dual embedding with Nesterov-Todd scaling and Mehrotra
// predictor-corrector steps. Infeasible instances terminate with Farkas
// certificates instead of diverging.

#pragma once

#include <Eigen/Dense>
#include <limits>
#include <string>
#include <vector>

#include "fdpa/conic.hpp"

namespace fdpa {

enum class SolveStatus {
  optimal,
  primal_infeasible,
  dual_infeasible_unbounded,
  max_iterations,
  numerical_failure,
};

const char* status_name(SolveStatus status);

struct SolverOptions {
  double eps_feas = 1e-8;    // target primal/dual residuals
  double eps_gap = 1e-8;     // target relative duality gap
  double eps_compl = 1e-10;  // target complementarity (drives rank-one purity)
  double eps_accept = 1e-6;  // acceptance level when progress stalls
  double eps_infeas = 1e-8;  // certificate residual threshold
  int max_iterations = 200;
  double step_fraction = 0.99;  // fraction-to-boundary
  double static_reg = 1e-10;    // static regularization of the Schur system
  bool trace = false;           // per-iteration log on stderr
};

/// Solution plus dual certificates, reported in the problem's original
/// (pre-normalization) units and descaled by the embedding's tau.
struct SolverResult {
  SolveStatus status = SolveStatus::numerical_failure;

  std::vector<Eigen::MatrixXcd> w;  // K Hermitian blocks
  Eigen::VectorXd p;                // J uplink powers
  double t = 0.0;

  Eigen::VectorXd xi;               // K multipliers of C~1
  Eigen::VectorXd psi;              // J multipliers of C~2
  Eigen::VectorXd alpha;            // J multipliers of C~3 (duals of P >= 0)
  Eigen::Vector2d theta{0.0, 0.0};  // multipliers of C~6
  std::vector<Eigen::MatrixXcd> y;  // K multipliers of C~4 (PSD duals)

  double primal_objective = std::numeric_limits<double>::quiet_NaN();
  double dual_objective = std::numeric_limits<double>::quiet_NaN();
  double gap = std::numeric_limits<double>::infinity();  // relative
  double residual_primal = std::numeric_limits<double>::infinity();
  double residual_dual = std::numeric_limits<double>::infinity();
  int iterations = 0;

  // For infeasible statuses: the Farkas certificate's scaled violation
  // (b.y with the certificate normalized to unit norm) and its residual.
  double infeas_violation = 0.0;
  double infeas_residual = std::numeric_limits<double>::infinity();

  std::string message;
};

SolverResult solve(const ConicProblem& prob, const SolverOptions& opts = {});

}  // namespace fdpa
