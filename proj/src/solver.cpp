// SPDX-License-Identifier: Apache-2.0

#include "fdpa/solver.hpp"

#include <cmath>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace fdpa {

const char* status_name(SolveStatus status) {
  switch (status) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::primal_infeasible: return "primal_infeasible";
    case SolveStatus::dual_infeasible_unbounded: return "dual_infeasible_unbounded";
    case SolveStatus::max_iterations: return "max_iterations";
    case SolveStatus::numerical_failure: return "numerical_failure";
  }
  return "?";
}

namespace {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Block vectors over the cone PSD(nt)^K x R+^{n_lin}. The free scalar (when
// present) is carried separately; it has no conic structure.

struct BlockVec {
  std::vector<MatrixXcd> mats;
  VectorXd lin;

  static BlockVec zero(int k, int nt, int n_lin) {
    BlockVec v;
    v.mats.assign(static_cast<std::size_t>(k), MatrixXcd::Zero(nt, nt));
    v.lin = VectorXd::Zero(n_lin);
    return v;
  }

  static BlockVec identity(int k, int nt, int n_lin) {
    BlockVec v;
    v.mats.assign(static_cast<std::size_t>(k), MatrixXcd::Identity(nt, nt));
    v.lin = VectorXd::Ones(n_lin);
    return v;
  }

  void symmetrize() {
    for (auto& m : mats) m = 0.5 * (m + m.adjoint()).eval();
  }
};

double dot(const BlockVec& a, const BlockVec& b) {
  double v = a.lin.size() ? a.lin.dot(b.lin) : 0.0;
  for (std::size_t i = 0; i < a.mats.size(); ++i)
    v += a.mats[i].cwiseProduct(b.mats[i].conjugate()).sum().real();
  return v;
}

double sqnorm(const BlockVec& a) { return dot(a, a); }

BlockVec operator+(const BlockVec& a, const BlockVec& b) {
  BlockVec r = a;
  for (std::size_t i = 0; i < r.mats.size(); ++i) r.mats[i] += b.mats[i];
  r.lin += b.lin;
  return r;
}

BlockVec operator-(const BlockVec& a, const BlockVec& b) {
  BlockVec r = a;
  for (std::size_t i = 0; i < r.mats.size(); ++i) r.mats[i] -= b.mats[i];
  r.lin -= b.lin;
  return r;
}

BlockVec operator*(double s, const BlockVec& a) {
  BlockVec r = a;
  for (auto& m : r.mats) m *= s;
  r.lin *= s;
  return r;
}

void add_scaled(BlockVec& y, double s, const BlockVec& x) {
  for (std::size_t i = 0; i < y.mats.size(); ++i) y.mats[i] += s * x.mats[i];
  y.lin += s * x.lin;
}

// ---------------------------------------------------------------------------
// Standard-form data assembled from a ConicProblem: rows are equalities
//   <a_i, x_cone> + af_i * t - s_i = b_i
// with the inequality slack s_i appended to the nonnegative part of x.

struct ProblemData {
  int k_blocks = 0;
  int nt = 0;
  int num_p = 0;
  int m = 0;
  int n_lin = 0;
  bool has_free = false;

  std::vector<BlockVec> rows;
  VectorXd row_free;  // free-column coefficients per row
  VectorXd row_equil; // internal row equilibration divisors
  VectorXd col_w;     // per-PSD-block column scales
  VectorXd col_lin;   // per-orthant-coordinate column scales
  double col_free = 1.0;
  VectorXd b;
  BlockVec c;
  double c_free = 0.0;
  double norm_b = 0.0;
  double norm_c = 0.0;
  double nu = 0.0;  // barrier degree
};

ProblemData build_data(const ConicProblem& prob) {
  ProblemData dat;
  dat.k_blocks = prob.num_dl;
  dat.nt = prob.nt;
  dat.num_p = prob.num_ul;
  dat.m = static_cast<int>(prob.rows.size());
  dat.n_lin = dat.num_p + dat.m;
  dat.has_free = prob.has_t;

  dat.rows.reserve(static_cast<std::size_t>(dat.m));
  dat.row_free = VectorXd::Zero(dat.m);
  dat.b = VectorXd::Zero(dat.m);
  for (int i = 0; i < dat.m; ++i) {
    const ConstraintRow& src = prob.rows[static_cast<std::size_t>(i)];
    BlockVec row = BlockVec::zero(dat.k_blocks, dat.nt, dat.n_lin);
    for (int k = 0; k < dat.k_blocks; ++k)
      row.mats[static_cast<std::size_t>(k)] = src.w_coeff[static_cast<std::size_t>(k)];
    row.lin.head(dat.num_p) = src.p_coeff;
    row.lin(dat.num_p + i) = -1.0;
    dat.rows.push_back(std::move(row));
    dat.row_free(i) = src.t_coeff;
    dat.b(i) = src.rhs;
  }

  dat.c = BlockVec::zero(dat.k_blocks, dat.nt, dat.n_lin);
  for (int k = 0; k < dat.k_blocks; ++k)
    dat.c.mats[static_cast<std::size_t>(k)] = prob.obj_w[static_cast<std::size_t>(k)];
  dat.c.lin.head(dat.num_p) = prob.obj_p;
  dat.c_free = prob.has_t ? prob.obj_t : 0.0;

  // Equilibration. The physical variables span several decades (beam powers
  // ~1e-3 W, uplink powers ~1e-6 W, noise constants down to 1e-14 W), which
  // would wreck the Schur complement's conditioning. Column scaling is one
  // scalar per PSD block and one per orthant coordinate, so cones map onto
  // themselves; it also puts the identity start at the solution's scale.
  const auto clamp_scale = [](double v) {
    return std::min(1e14, std::max(1e-14, v));
  };
  dat.col_w = VectorXd::Ones(std::max(1, dat.k_blocks));
  dat.col_lin = VectorXd::Ones(std::max(1, dat.n_lin));
  for (int k = 0; k < dat.k_blocks; ++k) {
    double mx = dat.c.mats[static_cast<std::size_t>(k)].cwiseAbs().maxCoeff();
    for (const BlockVec& row : dat.rows)
      mx = std::max(mx, row.mats[static_cast<std::size_t>(k)].cwiseAbs().maxCoeff());
    dat.col_w(k) = clamp_scale(mx > 0.0 ? 1.0 / mx : 1.0);
  }
  for (int j = 0; j < dat.n_lin; ++j) {
    double mx = std::abs(dat.c.lin(j));
    for (const BlockVec& row : dat.rows) mx = std::max(mx, std::abs(row.lin(j)));
    dat.col_lin(j) = clamp_scale(mx > 0.0 ? 1.0 / mx : 1.0);
  }
  {
    double mx = std::abs(dat.c_free);
    for (int i = 0; i < dat.m; ++i) mx = std::max(mx, std::abs(dat.row_free(i)));
    dat.col_free = dat.has_free ? clamp_scale(mx > 0.0 ? 1.0 / mx : 1.0) : 1.0;
  }
  const auto scale_cols = [&](BlockVec& v) {
    for (int k = 0; k < dat.k_blocks; ++k)
      v.mats[static_cast<std::size_t>(k)] *= dat.col_w(k);
    v.lin = v.lin.cwiseProduct(dat.col_lin);
  };
  scale_cols(dat.c);
  dat.c_free *= dat.col_free;
  for (BlockVec& row : dat.rows) scale_cols(row);
  dat.row_free *= dat.col_free;

  // Unit row norms on the column-scaled system.
  dat.row_equil = VectorXd::Ones(dat.m);
  for (int i = 0; i < dat.m; ++i) {
    const double rn = std::sqrt(sqnorm(dat.rows[static_cast<std::size_t>(i)]) +
                                dat.row_free(i) * dat.row_free(i));
    if (rn > 0.0) {
      dat.row_equil(i) = rn;
      dat.rows[static_cast<std::size_t>(i)] =
          (1.0 / rn) * dat.rows[static_cast<std::size_t>(i)];
      dat.row_free(i) /= rn;
      dat.b(i) /= rn;
    }
  }


  dat.norm_b = dat.b.norm();
  dat.norm_c = std::sqrt(sqnorm(dat.c) + dat.c_free * dat.c_free);
  dat.nu = static_cast<double>(dat.k_blocks * dat.nt + dat.n_lin);
  return dat;
}

VectorXd apply_a(const ProblemData& dat, const BlockVec& v, double vf) {
  VectorXd out(dat.m);
  for (int i = 0; i < dat.m; ++i)
    out(i) = dot(dat.rows[static_cast<std::size_t>(i)], v) + dat.row_free(i) * vf;
  return out;
}

void apply_at(const ProblemData& dat, const VectorXd& y, BlockVec& out, double& out_f) {
  out = BlockVec::zero(dat.k_blocks, dat.nt, dat.n_lin);
  out_f = 0.0;
  for (int i = 0; i < dat.m; ++i) {
    add_scaled(out, y(i), dat.rows[static_cast<std::size_t>(i)]);
    out_f += y(i) * dat.row_free(i);
  }
}

// ---------------------------------------------------------------------------
// Nesterov-Todd scaling. For each PSD block the factor R satisfies
// W^{-T} x = W z = diag(sigma); for the orthant, w = sqrt(x/z).

struct Scaling {
  std::vector<MatrixXcd> r, rinv, d;  // R, R^{-1}, D = R R^H
  std::vector<VectorXd> sigma;
  VectorXd w_lin, lam_lin;

  bool compute(const BlockVec& x, const BlockVec& z) {
    const std::size_t kb = x.mats.size();
    r.resize(kb);
    rinv.resize(kb);
    d.resize(kb);
    sigma.resize(kb);
    for (std::size_t k = 0; k < kb; ++k) {
      Eigen::LLT<MatrixXcd> lx(x.mats[k]);
      Eigen::LLT<MatrixXcd> lz(z.mats[k]);
      if (lx.info() != Eigen::Success || lz.info() != Eigen::Success) return false;
      const MatrixXcd lxm = lx.matrixL();
      const MatrixXcd lzm = lz.matrixL();
      Eigen::JacobiSVD<MatrixXcd> svd(lzm.adjoint() * lxm,
                                      Eigen::ComputeFullU | Eigen::ComputeFullV);
      const VectorXd& sv = svd.singularValues();
      if (sv.minCoeff() <= 0.0) return false;
      const VectorXd si = sv.cwiseSqrt();
      r[k] = lxm * svd.matrixV() * si.cwiseInverse().asDiagonal();
      rinv[k] = si.cwiseInverse().asDiagonal() * svd.matrixU().adjoint() * lzm.adjoint();
      d[k] = r[k] * r[k].adjoint();
      sigma[k] = sv;
    }
    if ((x.lin.array() <= 0.0).any() || (z.lin.array() <= 0.0).any()) return false;
    w_lin = (x.lin.array() / z.lin.array()).sqrt();
    lam_lin = (x.lin.array() * z.lin.array()).sqrt();
    return true;
  }

  // W u = R^H U R, elementwise w.*u on the orthant.
  BlockVec apply_w(const BlockVec& u) const {
    BlockVec v = u;
    for (std::size_t k = 0; k < v.mats.size(); ++k)
      v.mats[k] = r[k].adjoint() * u.mats[k] * r[k];
    v.lin = w_lin.cwiseProduct(u.lin);
    return v;
  }

  // W^T u = R U R^H.
  BlockVec apply_wt(const BlockVec& u) const {
    BlockVec v = u;
    for (std::size_t k = 0; k < v.mats.size(); ++k)
      v.mats[k] = r[k] * u.mats[k] * r[k].adjoint();
    v.lin = w_lin.cwiseProduct(u.lin);
    return v;
  }

  // W^{-T} u = R^{-1} U R^{-H}.
  BlockVec apply_winv_t(const BlockVec& u) const {
    BlockVec v = u;
    for (std::size_t k = 0; k < v.mats.size(); ++k)
      v.mats[k] = rinv[k] * u.mats[k] * rinv[k].adjoint();
    v.lin = u.lin.cwiseQuotient(w_lin);
    return v;
  }

  // H u = W^T W u = D U D, elementwise w^2.*u.
  BlockVec apply_h(const BlockVec& u) const {
    BlockVec v = u;
    for (std::size_t k = 0; k < v.mats.size(); ++k)
      v.mats[k] = d[k] * u.mats[k] * d[k];
    v.lin = w_lin.array().square().matrix().cwiseProduct(u.lin);
    return v;
  }

  // Scaled point lambda = W^{-T} x = W z as a BlockVec.
  BlockVec lambda_vec(int k_blocks, int nt, int n_lin) const {
    BlockVec v = BlockVec::zero(k_blocks, nt, n_lin);
    for (std::size_t k = 0; k < v.mats.size(); ++k)
      v.mats[k] = sigma[k].cast<std::complex<double>>().asDiagonal();
    v.lin = lam_lin;
    return v;
  }

  // Solve lambda o u = rhs in the scaled frame where lambda is diagonal.
  BlockVec lambda_solve(const BlockVec& rhs) const {
    BlockVec v = rhs;
    for (std::size_t k = 0; k < v.mats.size(); ++k) {
      const VectorXd& s = sigma[k];
      for (Eigen::Index i = 0; i < v.mats[k].rows(); ++i)
        for (Eigen::Index j = 0; j < v.mats[k].cols(); ++j)
          v.mats[k](i, j) = 2.0 * rhs.mats[k](i, j) / (s(i) + s(j));
    }
    v.lin = rhs.lin.cwiseQuotient(lam_lin);
    return v;
  }
};

// Jordan product in the scaled frame: (ab + ba)/2, elementwise on the orthant.
BlockVec jordan_prod(const BlockVec& a, const BlockVec& b) {
  BlockVec v = a;
  for (std::size_t k = 0; k < v.mats.size(); ++k)
    v.mats[k] = 0.5 * (a.mats[k] * b.mats[k] + b.mats[k] * a.mats[k]);
  v.lin = a.lin.cwiseProduct(b.lin);
  return v;
}

// Largest step alpha with lambda + alpha * dir in the cone; dir given in the
// scaled frame where lambda = diag(sigma) (orthant part lam_lin).
double max_step(const Scaling& sc, const BlockVec& dir) {
  double bound = kInf;
  for (std::size_t k = 0; k < dir.mats.size(); ++k) {
    const VectorXd isq = sc.sigma[k].cwiseSqrt().cwiseInverse();
    const MatrixXcd scaled =
        isq.asDiagonal() * dir.mats[k] * isq.asDiagonal();
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(scaled, Eigen::EigenvaluesOnly);
    const double mn = es.eigenvalues().minCoeff();
    if (mn < 0.0) bound = std::min(bound, -1.0 / mn);
  }
  for (Eigen::Index i = 0; i < dir.lin.size(); ++i)
    if (dir.lin(i) < 0.0) bound = std::min(bound, -sc.lam_lin(i) / dir.lin(i));
  return bound;
}

struct Direction {
  BlockVec dx, dz;
  double dxf = 0.0;
  VectorXd dy;
  double dtau = 0.0, dkappa = 0.0;
  BlockVec dx_scaled, dz_scaled;  // W^{-T} dx, W dz
};

// Schur-complement KKT solver with an optional single free column handled by
// block elimination; one round of iterative refinement against the exact
// (unregularized) system.
struct KktSystem {
  MatrixXd m_exact;
  Eigen::LLT<MatrixXd> llt;
  VectorXd minv_af;
  VectorXd af;
  double denom_f = 0.0;
  bool has_free = false;

  bool factor(const ProblemData& dat, const Scaling& sc, double static_reg) {
    const int m = dat.m;
    std::vector<BlockVec> h_rows;
    h_rows.reserve(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i)
      h_rows.push_back(sc.apply_h(dat.rows[static_cast<std::size_t>(i)]));
    m_exact.resize(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j) {
        const double v = dot(dat.rows[static_cast<std::size_t>(i)],
                             h_rows[static_cast<std::size_t>(j)]);
        m_exact(i, j) = v;
        m_exact(j, i) = v;
      }
    // The rows are linearly independent by construction (each carries its own
    // slack), so M is positive definite; factor it raw and only fall back to
    // a statically regularized copy when the factorization breaks down
    // numerically. Refinement against the exact matrix then converges.
    llt.compute(m_exact);
    if (llt.info() != Eigen::Success) {
      MatrixXd m_reg = m_exact;
      double reg = static_reg * (1.0 + m_exact.diagonal().cwiseAbs().maxCoeff());
      for (int attempt = 0; attempt < 3; ++attempt) {
        m_reg.diagonal().array() += reg;
        llt.compute(m_reg);
        if (llt.info() == Eigen::Success) break;
        reg *= 1e4;
      }
      if (llt.info() != Eigen::Success) return false;
    }
    has_free = dat.has_free;
    if (has_free) {
      af = dat.row_free;
      minv_af = solve_reg(af);
      denom_f = af.dot(minv_af);
      if (!(denom_f > 0.0)) return false;
    }
    return true;
  }

  VectorXd solve_reg(const VectorXd& rhs) const {
    VectorXd u = llt.solve(rhs);
    // Refinement against the exact (unregularized) matrix.
    for (int round = 0; round < 3; ++round) {
      const VectorXd r = rhs - m_exact * u;
      if (!r.allFinite()) break;
      u += llt.solve(r);
    }
    return u;
  }

  // Solve [M af; af^T 0] [u; uf] = [r1; r2] (uf unused when no free column).
  void solve(const VectorXd& r1, double r2, VectorXd& u, double& uf) const {
    if (!has_free) {
      u = solve_reg(r1);
      uf = 0.0;
      return;
    }
    const VectorXd u0 = solve_reg(r1);
    uf = (af.dot(u0) - r2) / denom_f;
    u = u0 - uf * minv_af;
  }
};

struct Residuals {
  VectorXd rp;
  BlockVec rd;
  double rd_f = 0.0;
  double rg = 0.0;
};

struct Metrics {
  double pcost = 0.0, dcost = 0.0;
  double relgap = kInf, compl_rel = kInf, pres = kInf, dres = kInf;

  // Worst target ratio; <= 1 means every target tolerance is met.
  double score(const SolverOptions& o) const {
    return std::max(std::max(pres / o.eps_feas, dres / o.eps_feas),
                    std::max(relgap / o.eps_gap, compl_rel / o.eps_compl));
  }
  bool at_accept(const SolverOptions& o) const {
    return pres <= o.eps_accept && dres <= o.eps_accept && relgap <= o.eps_accept;
  }
};

struct IterState {
  BlockVec x, z;
  double xf = 0.0;
  VectorXd y;
  double tau = 1.0, kappa = 1.0;
};

class HsdeSolver {
 public:
  HsdeSolver(const ConicProblem& prob, const SolverOptions& opts)
      : prob_(prob), opts_(opts), dat_(build_data(prob)) {}

  SolverResult run() {
    IterState s;
    s.x = BlockVec::identity(dat_.k_blocks, dat_.nt, dat_.n_lin);
    s.z = BlockVec::identity(dat_.k_blocks, dat_.nt, dat_.n_lin);
    s.y = VectorXd::Zero(dat_.m);

    SolverResult res;
    IterState best_state = s;
    Metrics best_met;
    double best_score = kInf;
    int best_iter = 0;
    for (int iter = 0; iter <= opts_.max_iterations; ++iter) {
      const Residuals rs = residuals(s);
      const double gap_xz = dot(s.x, s.z);
      const double mu = (gap_xz + s.tau * s.kappa) / (dat_.nu + 1.0);

      Metrics met;
      met.pcost = (dot(dat_.c, s.x) + dat_.c_free * s.xf) / s.tau;
      met.dcost = dat_.b.dot(s.y) / s.tau;
      met.relgap = std::abs(met.pcost - met.dcost) / (1.0 + std::abs(met.pcost));
      met.compl_rel = gap_xz / (s.tau * s.tau) / (1.0 + std::abs(met.pcost));
      met.pres = rs.rp.norm() / (s.tau * (1.0 + dat_.norm_b));
      met.dres = std::sqrt(sqnorm(rs.rd) + rs.rd_f * rs.rd_f) /
                 (s.tau * (1.0 + dat_.norm_c));

      if (opts_.trace) {
        std::ostringstream os;
        os << "norms x " << std::sqrt(sqnorm(s.x)) << " y " << s.y.norm()
           << " z " << std::sqrt(sqnorm(s.z)) << " xf " << s.xf << "\n";
        os << "iter " << iter << " pcost " << met.pcost << " dcost " << met.dcost
           << " gap " << met.relgap << " compl " << met.compl_rel << " pres "
           << met.pres << " dres " << met.dres << " mu " << mu << " tau "
           << s.tau << " kappa " << s.kappa;
        std::cerr << os.str() << "\n";
      }

      if (met.score(opts_) <= best_score) {
        best_score = met.score(opts_);
        best_state = s;
        best_met = met;
        best_iter = iter;
      }

      if (met.score(opts_) <= 1.0) {
        finish_optimal(res, s, met, iter);
        return res;
      }

      // Farkas certificates. A feasible, bounded problem never triggers these.
      {
        BlockVec aty;
        double aty_f = 0.0;
        apply_at(dat_, s.y, aty, aty_f);
        const double by = dat_.b.dot(s.y);
        if (by > 0.0) {
          const double cert_res =
              std::sqrt(sqnorm(aty + s.z) + aty_f * aty_f);
          if (cert_res <= opts_.eps_infeas * by) {
            finish_infeasible(res, s, by, cert_res, iter, /*primal=*/true);
            return res;
          }
        }
        const double cobj = dot(dat_.c, s.x) + dat_.c_free * s.xf;
        if (cobj < 0.0) {
          const double ray_res = apply_a(dat_, s.x, s.xf).norm();
          if (ray_res <= opts_.eps_infeas * (-cobj)) {
            finish_infeasible(res, s, -cobj, ray_res, iter, /*primal=*/false);
            return res;
          }
        }
      }

      if (iter == opts_.max_iterations) {
        if (best_met.at_accept(opts_)) {
          finish_optimal(res, best_state, best_met, best_iter);
          res.message = "accepted at reduced tolerance after iteration cap";
        } else {
          fill_metrics(res, met, iter);
          res.status = SolveStatus::max_iterations;
          res.message = "iteration cap reached";
        }
        return res;
      }

      Scaling sc;
      if (!sc.compute(s.x, s.z)) {
        if (best_met.at_accept(opts_)) {
          finish_optimal(res, best_state, best_met, best_iter);
          res.message = "accepted at reduced tolerance (scaling breakdown)";
        } else {
          fill_metrics(res, met, iter);
          res.status = SolveStatus::numerical_failure;
          res.message = "Nesterov-Todd scaling breakdown";
        }
        return res;
      }

      KktSystem kkt;
      if (!kkt.factor(dat_, sc, opts_.static_reg)) {
        if (best_met.at_accept(opts_)) {
          finish_optimal(res, best_state, best_met, best_iter);
          res.message = "accepted at reduced tolerance (factorization failure)";
        } else {
          fill_metrics(res, met, iter);
          res.status = SolveStatus::numerical_failure;
          res.message = "KKT factorization failed";
        }
        return res;
      }

      const BlockVec lam = sc.lambda_vec(dat_.k_blocks, dat_.nt, dat_.n_lin);
      const BlockVec lam_sq = jordan_prod(lam, lam);
      const BlockVec hc = sc.apply_h(dat_.c);
      const VectorXd w1 = apply_a(dat_, hc, 0.0) + dat_.b;
      VectorXd vy;
      double vt = 0.0;
      kkt.solve(w1, dat_.c_free, vy, vt);

      // Predictor.
      BlockVec ds = -1.0 * lam_sq;
      double dk = -s.tau * s.kappa;
      Direction aff = newton(s, rs, sc, kkt, vy, vt, hc, 1.0, ds, dk);

      const double g0 = gap_xz + s.tau * s.kappa;
      double alpha_aff = step_to_boundary(sc, s, aff);
      alpha_aff = std::min(1.0, alpha_aff);
      const double gap_aff =
          dot(s.x + alpha_aff * aff.dx, s.z + alpha_aff * aff.dz) +
          (s.tau + alpha_aff * aff.dtau) * (s.kappa + alpha_aff * aff.dkappa);
      double sigma = std::pow(std::max(0.0, gap_aff / g0), 3.0);
      sigma = std::min(1.0, std::max(1e-4, sigma));

      // Combined corrector step.
      BlockVec corr = jordan_prod(aff.dx_scaled, aff.dz_scaled);
      ds = -1.0 * lam_sq - corr;
      for (auto& m : ds.mats)
        m.diagonal().array() += sigma * mu;
      ds.lin.array() += sigma * mu;
      dk = sigma * mu - s.tau * s.kappa - aff.dtau * aff.dkappa;
      Direction dir = newton(s, rs, sc, kkt, vy, vt, hc, 1.0 - sigma, ds, dk);

      double alpha = opts_.step_fraction * step_to_boundary(sc, s, dir);
      alpha = std::min(1.0, alpha);
      // Guard against crashing the barrier parameter several orders of
      // magnitude in one step; the Newton accuracy at extreme mu cannot
      // follow and primal feasibility would be lost.
      for (int back = 0; back < 12; ++back) {
        const double g_next =
            dot(s.x + alpha * dir.dx, s.z + alpha * dir.dz) +
            (s.tau + alpha * dir.dtau) * (s.kappa + alpha * dir.dkappa);
        if (g_next >= 2e-3 * g0 || alpha <= 0.05) break;
        alpha *= 0.7;
      }
      if (!(alpha > 1e-10) || !std::isfinite(alpha)) {
        if (best_met.at_accept(opts_)) {
          finish_optimal(res, best_state, best_met, best_iter);
          res.message = "accepted at reduced tolerance (step collapse)";
        } else {
          fill_metrics(res, met, iter);
          res.status = SolveStatus::numerical_failure;
          res.message = "step length collapsed";
        }
        return res;
      }

      add_scaled(s.x, alpha, dir.dx);
      add_scaled(s.z, alpha, dir.dz);
      s.xf += alpha * dir.dxf;
      s.y += alpha * dir.dy;
      s.tau += alpha * dir.dtau;
      s.kappa += alpha * dir.dkappa;
      s.x.symmetrize();
      s.z.symmetrize();
    }
    res.status = SolveStatus::numerical_failure;  // unreachable
    return res;
  }

 private:
  Residuals residuals(const IterState& s) const {
    Residuals rs;
    rs.rp = apply_a(dat_, s.x, s.xf) - dat_.b * s.tau;
    BlockVec aty;
    double aty_f = 0.0;
    apply_at(dat_, s.y, aty, aty_f);
    rs.rd = -1.0 * aty + s.tau * dat_.c - s.z;
    rs.rd_f = dat_.has_free ? (-aty_f + dat_.c_free * s.tau) : 0.0;
    rs.rg = s.kappa + dot(dat_.c, s.x) + dat_.c_free * s.xf - dat_.b.dot(s.y);
    return rs;
  }

  struct NewtonRhs {
    VectorXd r1;    // primal equation
    BlockVec r2c;   // dual equation, cone part
    double r2f = 0.0;  // dual equation, free part
    double r3 = 0.0;   // gap equation
    BlockVec r4;    // scaled complementarity target (scaled frame)
    double r5 = 0.0;   // tau-kappa complementarity target
  };

  Direction newton_once(const IterState& s, const Scaling& sc,
                        const KktSystem& kkt, const VectorXd& vy, double vt,
                        const BlockVec& hc, const NewtonRhs& rhs) const {
    const BlockVec lam_div = sc.lambda_solve(rhs.r4);
    const BlockVec wt_ld = sc.apply_wt(lam_div);
    const BlockVec h_rd = sc.apply_h(rhs.r2c);
    const VectorXd r1 =
        rhs.r1 - apply_a(dat_, wt_ld, 0.0) - apply_a(dat_, h_rd, 0.0);

    VectorXd uy;
    double ut = 0.0;
    kkt.solve(r1, -rhs.r2f, uy, ut);

    BlockVec at_uy, at_vy;
    double at_uyf = 0.0, at_vyf = 0.0;
    apply_at(dat_, uy, at_uy, at_uyf);
    apply_at(dat_, vy, at_vy, at_vyf);

    const BlockVec ux = wt_ld + sc.apply_h(at_uy) + h_rd;
    const BlockVec vx = sc.apply_h(at_vy) - hc;

    const double den = -s.kappa / s.tau + dot(dat_.c, vx) + dat_.c_free * vt -
                       dat_.b.dot(vy);
    const double num = rhs.r3 - rhs.r5 / s.tau - dot(dat_.c, ux) -
                       dat_.c_free * ut + dat_.b.dot(uy);
    const double dtau = num / den;

    Direction dir;
    dir.dy = uy + dtau * vy;
    dir.dxf = dat_.has_free ? (ut + dtau * vt) : 0.0;
    dir.dx = ux + dtau * vx;
    BlockVec at_dy;
    double at_dyf = 0.0;
    apply_at(dat_, dir.dy, at_dy, at_dyf);
    dir.dz = -1.0 * at_dy + dtau * dat_.c - rhs.r2c;
    dir.dtau = dtau;
    dir.dkappa = (rhs.r5 - s.kappa * dtau) / s.tau;
    return dir;
  }

  /// Residuals of the full Newton system at a candidate direction.
  NewtonRhs newton_residual(const IterState& s, const Scaling& sc,
                            const NewtonRhs& rhs, const Direction& dir) const {
    NewtonRhs res;
    res.r1 = rhs.r1 - (apply_a(dat_, dir.dx, dir.dxf) - dat_.b * dir.dtau);
    BlockVec at_dy;
    double at_dyf = 0.0;
    apply_at(dat_, dir.dy, at_dy, at_dyf);
    res.r2c = rhs.r2c - (-1.0 * at_dy + dir.dtau * dat_.c - dir.dz);
    res.r2f =
        rhs.r2f - (dat_.has_free ? (-at_dyf + dat_.c_free * dir.dtau) : 0.0);
    res.r3 = rhs.r3 - (dir.dkappa + dot(dat_.c, dir.dx) +
                       dat_.c_free * dir.dxf - dat_.b.dot(dir.dy));
    const BlockVec lam = sc.lambda_vec(dat_.k_blocks, dat_.nt, dat_.n_lin);
    res.r4 = rhs.r4 - jordan_prod(lam, sc.apply_winv_t(dir.dx) +
                                           sc.apply_w(dir.dz));
    res.r5 = rhs.r5 - (s.kappa * dir.dtau + s.tau * dir.dkappa);
    return res;
  }

  Direction newton(const IterState& s, const Residuals& rs, const Scaling& sc,
                   const KktSystem& kkt, const VectorXd& vy, double vt,
                   const BlockVec& hc, double eta, const BlockVec& ds,
                   double dk) const {
    NewtonRhs rhs;
    rhs.r1 = -eta * rs.rp;
    rhs.r2c = -eta * rs.rd;
    rhs.r2f = -eta * rs.rd_f;
    rhs.r3 = -eta * rs.rg;
    rhs.r4 = ds;
    rhs.r5 = dk;

    Direction dir = newton_once(s, sc, kkt, vy, vt, hc, rhs);
    // One refinement round against the full system; the normal-equation
    // elimination alone loses primal accuracy once the scaling degenerates.
    const NewtonRhs res = newton_residual(s, sc, rhs, dir);
    const Direction fix = newton_once(s, sc, kkt, vy, vt, hc, res);
    dir.dx = dir.dx + fix.dx;
    dir.dz = dir.dz + fix.dz;
    dir.dy += fix.dy;
    dir.dxf += fix.dxf;
    dir.dtau += fix.dtau;
    dir.dkappa += fix.dkappa;

    dir.dx_scaled = sc.apply_winv_t(dir.dx);
    dir.dz_scaled = sc.apply_w(dir.dz);
    dir.dx_scaled.symmetrize();
    dir.dz_scaled.symmetrize();
    return dir;
  }

  double step_to_boundary(const Scaling& sc, const IterState& s,
                          const Direction& dir) const {
    double bound = std::min(max_step(sc, dir.dx_scaled), max_step(sc, dir.dz_scaled));
    if (dir.dtau < 0.0) bound = std::min(bound, -s.tau / dir.dtau);
    if (dir.dkappa < 0.0) bound = std::min(bound, -s.kappa / dir.dkappa);
    return bound;
  }

  void fill_metrics(SolverResult& res, const Metrics& met, int iter) const {
    res.primal_objective = met.pcost;
    res.dual_objective = met.dcost;
    res.gap = met.relgap;
    res.residual_primal = met.pres;
    res.residual_dual = met.dres;
    res.iterations = iter;
  }

  void finish_optimal(SolverResult& res, const IterState& s, const Metrics& met,
                      int iter) const {
    fill_metrics(res, met, iter);
    res.status = SolveStatus::optimal;

    res.w.resize(static_cast<std::size_t>(dat_.k_blocks));
    res.y.resize(static_cast<std::size_t>(dat_.k_blocks));
    for (int k = 0; k < dat_.k_blocks; ++k) {
      const double cs = dat_.col_w(k);
      res.w[static_cast<std::size_t>(k)] =
          (cs * s.x.mats[static_cast<std::size_t>(k)] / s.tau).eval();
      res.y[static_cast<std::size_t>(k)] =
          (s.z.mats[static_cast<std::size_t>(k)] / (cs * s.tau)).eval();
    }
    res.p = s.x.lin.head(dat_.num_p)
                .cwiseProduct(dat_.col_lin.head(dat_.num_p)) /
            s.tau;
    res.t = dat_.has_free ? dat_.col_free * s.xf / s.tau : 0.0;
    res.alpha = s.z.lin.head(dat_.num_p)
                    .cwiseQuotient(dat_.col_lin.head(dat_.num_p)) /
                s.tau;

    res.xi = VectorXd::Zero(prob_.num_dl);
    res.psi = VectorXd::Zero(prob_.num_ul);
    res.theta.setZero();
    for (int i = 0; i < dat_.m; ++i) {
      const ConstraintRow& row = prob_.rows[static_cast<std::size_t>(i)];
      const double mult = s.y(i) / (s.tau * row.scale * dat_.row_equil(i));
      switch (row.kind) {
        case RowKind::qos_dl: res.xi(row.index) = mult; break;
        case RowKind::qos_ul: res.psi(row.index) = mult; break;
        case RowKind::tcheby: res.theta(row.index) = mult; break;
      }
    }
  }

  void finish_infeasible(SolverResult& res, const IterState& s, double violation,
                         double cert_res, int iter, bool primal) const {
    res.iterations = iter;
    res.status = primal ? SolveStatus::primal_infeasible
                        : SolveStatus::dual_infeasible_unbounded;
    if (primal) {
      const double ny = s.y.norm();
      res.infeas_violation = ny > 0.0 ? violation / ny : 0.0;
      res.infeas_residual = ny > 0.0 ? cert_res / ny : kInf;
      res.xi = VectorXd::Zero(prob_.num_dl);
      res.psi = VectorXd::Zero(prob_.num_ul);
      res.theta.setZero();
      for (int i = 0; i < dat_.m; ++i) {
        const ConstraintRow& row = prob_.rows[static_cast<std::size_t>(i)];
        const double mult =
            ny > 0.0 ? s.y(i) / (ny * row.scale * dat_.row_equil(i)) : 0.0;
        switch (row.kind) {
          case RowKind::qos_dl: res.xi(row.index) = mult; break;
          case RowKind::qos_ul: res.psi(row.index) = mult; break;
          case RowKind::tcheby: res.theta(row.index) = mult; break;
        }
      }
      res.message = "primal infeasibility certificate";
    } else {
      const double nx = std::sqrt(sqnorm(s.x) + s.xf * s.xf);
      res.infeas_violation = nx > 0.0 ? violation / nx : 0.0;
      res.infeas_residual = nx > 0.0 ? cert_res / nx : kInf;
      res.w.resize(static_cast<std::size_t>(dat_.k_blocks));
      for (int k = 0; k < dat_.k_blocks; ++k)
        res.w[static_cast<std::size_t>(k)] =
            dat_.col_w(k) * s.x.mats[static_cast<std::size_t>(k)] / nx;
      res.p = s.x.lin.head(dat_.num_p)
                  .cwiseProduct(dat_.col_lin.head(dat_.num_p)) /
              nx;
      res.message = "dual infeasibility (unboundedness) certificate";
    }
  }

  const ConicProblem& prob_;
  SolverOptions opts_;
  ProblemData dat_;
};

}  // namespace

SolverResult solve(const ConicProblem& prob, const SolverOptions& opts) {
  if (prob.num_dl != static_cast<int>(prob.obj_w.size()))
    throw std::invalid_argument("solve: objective blocks do not match num_dl");
  for (const auto& row : prob.rows)
    if (static_cast<int>(row.w_coeff.size()) != prob.num_dl)
      throw std::invalid_argument("solve: row block count mismatch");
  HsdeSolver solver(prob, opts);
  return solver.run();
}

}  // namespace fdpa
