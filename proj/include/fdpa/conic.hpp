// SPDX-License-Identifier: Apache-2.0
//
// Data model for the lifted conic programs: Hermitian PSD blocks W_k,
// nonnegative uplink powers P_j, an optional free epigraph scalar t, and
// affine >= constraints assembled from the QoS and scalarization rows.

#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

namespace fdpa {

enum class RowKind { qos_dl, qos_ul, tcheby };

const char* row_kind_name(RowKind kind);

/// One affine row:
///   sum_k <w_coeff[k], W_k> + p_coeff . P + t_coeff * t >= rhs.
/// Rows are stored normalized (divided by `scale`); multiplying a stored row
/// by `scale` recovers the paper-unit coefficients.
struct ConstraintRow {
  RowKind kind = RowKind::qos_dl;
  int index = 0;  // user index k / j, or Tchebycheff objective index i
  std::vector<Eigen::MatrixXcd> w_coeff;
  Eigen::VectorXd p_coeff;
  double t_coeff = 0.0;
  double rhs = 0.0;
  double scale = 1.0;
};

struct ConicProblem {
  int nt = 0;
  int num_dl = 0;  // K PSD blocks of dimension nt
  int num_ul = 0;  // J nonnegative scalars
  bool has_t = false;

  std::vector<Eigen::MatrixXcd> obj_w;
  Eigen::VectorXd obj_p;
  double obj_t = 0.0;

  std::vector<ConstraintRow> rows;

  // Constraint data retained for certificate reconstruction (original units).
  std::vector<Eigen::MatrixXcd> h_outer;   // K: H_k = h_k h_k^H
  std::vector<Eigen::MatrixXcd> si_outer;  // J: H_SI^H V_j H_SI
  Eigen::VectorXd gamma_dl;                // K linear targets
  Eigen::VectorXd gamma_ul;                // J linear targets
  Eigen::Vector2d lambda{0.0, 0.0};        // Tchebycheff weights (has_t only)
  Eigen::Vector2d q_star{0.0, 0.0};        // anchors (has_t only)
};

/// Real Frobenius inner product of Hermitian matrices.
double herm_inner(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

/// Left-hand side of a stored (normalized) row at a lifted candidate.
double row_lhs(const ConstraintRow& row, const std::vector<Eigen::MatrixXcd>& w,
               const Eigen::VectorXd& p, double t);

/// lhs - rhs in original (pre-normalization) units.
double row_residual_unscaled(const ConstraintRow& row,
                             const std::vector<Eigen::MatrixXcd>& w,
                             const Eigen::VectorXd& p, double t);

double objective_value(const ConicProblem& prob,
                       const std::vector<Eigen::MatrixXcd>& w,
                       const Eigen::VectorXd& p, double t);

/// Sparse line-oriented text dump (block index, row, col, re, im per
/// coefficient) for cross-solver regression; load inverts it exactly.
void save_problem(std::ostream& os, const ConicProblem& prob);
ConicProblem load_problem(std::istream& is);
void save_problem_file(const std::string& path, const ConicProblem& prob);
ConicProblem load_problem_file(const std::string& path);

}  // namespace fdpa
