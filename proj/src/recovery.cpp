// SPDX-License-Identifier: Apache-2.0

#include "fdpa/recovery.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fdpa {

int numerical_rank(const Eigen::MatrixXcd& a, double rel_tol) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd ev = es.eigenvalues();
  const double top = ev.cwiseAbs().maxCoeff();
  if (top <= 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev(i) > rel_tol * top) ++rank;
  return rank;
}

RecoveryReport extract(const SolverResult& result) {
  if (result.status != SolveStatus::optimal)
    throw std::invalid_argument("extract: solver status is not optimal");

  RecoveryReport rep;
  const std::size_t kb = result.w.size();
  rep.w.resize(kb);
  rep.eigen_ratio.assign(kb, 0.0);
  rep.w_rank.assign(kb, 0);

  double total_power = 0.0;
  for (const auto& wk : result.w) total_power += wk.trace().real();

  for (std::size_t k = 0; k < kb; ++k) {
    const Eigen::MatrixXcd& wk = result.w[k];
    const int nt = static_cast<int>(wk.rows());
    const double tr = wk.trace().real();
    if (tr < 1e-12 * total_power) {
      // Served almost for free; outside the rank-one statistics.
      rep.w[k] = Eigen::VectorXcd::Zero(nt);
      rep.w_rank[k] = 0;
      continue;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(wk);
    const Eigen::VectorXd& ev = es.eigenvalues();  // ascending
    const double lam1 = ev(nt - 1);
    const double lam2 = nt > 1 ? std::max(0.0, ev(nt - 2)) : 0.0;
    rep.eigen_ratio[k] = lam1 > 0.0 ? lam2 / lam1 : 1.0;
    rep.eigen_ratio_max = std::max(rep.eigen_ratio_max, rep.eigen_ratio[k]);
    rep.w_rank[k] = numerical_rank(wk);

    Eigen::VectorXcd u = es.eigenvectors().col(nt - 1);
    // Fix the arbitrary global phase: largest-magnitude entry real positive.
    Eigen::Index imax;
    u.cwiseAbs().maxCoeff(&imax);
    const std::complex<double> ph = u(imax) / std::abs(u(imax));
    u /= ph;
    rep.w[k] = std::sqrt(std::max(0.0, lam1)) * u;
    if (rep.eigen_ratio[k] > 1e-3) rep.rank_one_ok = false;
  }
  if (!rep.rank_one_ok) rep.message = "rank-one recovery failed";

  rep.p = result.p;
  for (const auto& wk : rep.w) rep.dl_power += wk.squaredNorm();
  rep.ul_power = result.p.size() ? result.p.sum() : 0.0;
  return rep;
}

KktCheck verify_kkt(const SolverResult& result, const ConicProblem& prob) {
  if (result.status != SolveStatus::optimal)
    throw std::invalid_argument("verify_kkt: solver status is not optimal");

  KktCheck chk;
  const int kb = prob.num_dl;
  const int nt = prob.nt;
  chk.y_rank.assign(static_cast<std::size_t>(kb), 0);
  chk.r_k_min_eig.assign(static_cast<std::size_t>(kb), 0.0);

  // (a) dual sign conditions.
  double sign_min = 0.0;
  if (result.xi.size()) sign_min = std::min(sign_min, result.xi.minCoeff());
  if (result.psi.size()) sign_min = std::min(sign_min, result.psi.minCoeff());
  if (prob.has_t) sign_min = std::min(sign_min, result.theta.minCoeff());
  if (result.alpha.size()) sign_min = std::min(sign_min, result.alpha.minCoeff());
  for (int k = 0; k < kb; ++k) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
        result.y[static_cast<std::size_t>(k)], Eigen::EigenvaluesOnly);
    sign_min = std::min(sign_min, es.eigenvalues().minCoeff());
  }
  chk.dual_sign_min = sign_min;
  if (sign_min < -1e-9) {
    chk.passed = false;
    chk.failure = "dual sign condition violated";
  }

  chk.r_min_eig = std::numeric_limits<double>::infinity();
  for (int k = 0; k < kb; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const Eigen::MatrixXcd& wk = result.w[ku];
    const Eigen::MatrixXcd& yk = result.y[ku];

    // (b) complementary slackness.
    const double compl_rel =
        (yk * wk).norm() / (1.0 + wk.norm());
    chk.complementarity_max = std::max(chk.complementarity_max, compl_rel);

    // Reduced multiplier: every row's pull on block k except the block's own
    // QoS row, plus the objective coefficient.
    Eigen::MatrixXcd rk = prob.obj_w[ku];
    for (int m = 0; m < kb; ++m)
      if (m != k)
        rk += result.xi(m) * prob.h_outer[static_cast<std::size_t>(m)];
    for (int j = 0; j < prob.num_ul; ++j)
      rk += result.psi(j) * prob.si_outer[static_cast<std::size_t>(j)];
    if (prob.has_t)
      rk += result.theta(0) * prob.lambda(0) *
            Eigen::MatrixXcd::Identity(nt, nt);

    // (c) stationarity.
    const Eigen::MatrixXcd y_recon =
        rk - (result.xi(k) / prob.gamma_dl(k)) * prob.h_outer[ku];
    const double stat_rel = (yk - y_recon).norm() / (1.0 + rk.norm());
    chk.stationarity_max = std::max(chk.stationarity_max, stat_rel);

    // (d) positive definiteness of the reduced multiplier.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rk, Eigen::EigenvaluesOnly);
    chk.r_k_min_eig[ku] = es.eigenvalues().minCoeff();
    chk.r_min_eig = std::min(chk.r_min_eig, chk.r_k_min_eig[ku]);

    // (e) numerical rank of the PSD dual block.
    chk.y_rank[ku] = numerical_rank(yk);
  }
  if (kb == 0) chk.r_min_eig = 0.0;

  if (chk.passed && chk.complementarity_max > 1e-6) {
    chk.passed = false;
    chk.failure = "complementary slackness violated";
  }
  if (chk.passed && chk.stationarity_max > 1e-6) {
    chk.passed = false;
    chk.failure = "stationarity residual too large";
  }
  if (chk.passed && kb > 0 && !(chk.r_min_eig > 0.0)) {
    chk.passed = false;
    chk.failure = "reduced multiplier not positive definite";
  }

  if (prob.has_t) {
    chk.theta_sum_err = std::abs(result.theta.sum() - 1.0);
    chk.theta_sum_ok = chk.theta_sum_err <= 1e-7;
    if (chk.passed && !chk.theta_sum_ok) {
      chk.passed = false;
      chk.failure = "scalarization multipliers do not sum to one";
    }
  }
  return chk;
}

EvaluationReport evaluate(const ChannelRealization& ch, const ReceiveBank& bank,
                          const RecoveryReport& report, const Targets& targets) {
  CandidateSolution sol;
  sol.w = report.w;
  sol.p = report.p;

  EvaluationReport ev;
  ev.sinr_dl = sinr_downlink(ch, sol);
  ev.sinr_ul = sinr_uplink(ch, bank, sol);
  ev.margin_dl = (ev.sinr_dl.array() / targets.gamma_dl.array() - 1.0).matrix();
  ev.margin_ul = (ev.sinr_ul.array() / targets.gamma_ul.array() - 1.0).matrix();
  const double tol = -1e-6;
  ev.feasible = (ev.margin_dl.size() == 0 || ev.margin_dl.minCoeff() >= tol) &&
                (ev.margin_ul.size() == 0 || ev.margin_ul.minCoeff() >= tol);
  return ev;
}

std::string certificate_summary(const KktCheck& chk) {
  std::ostringstream os;
  os.precision(6);
  os << "kkt_passed " << (chk.passed ? 1 : 0) << "\n"
     << "dual_sign_min " << chk.dual_sign_min << "\n"
     << "complementarity_max " << chk.complementarity_max << "\n"
     << "stationarity_max " << chk.stationarity_max << "\n"
     << "r_min_eig " << chk.r_min_eig << "\n"
     << "theta_sum_ok " << (chk.theta_sum_ok ? 1 : 0) << "\n";
  os << "y_rank";
  for (int r : chk.y_rank) os << " " << r;
  os << "\n";
  if (!chk.failure.empty()) os << "failure " << chk.failure << "\n";
  return os.str();
}

}  // namespace fdpa
