// SPDX-License-Identifier: Apache-2.0

#include "fdpa/hd_baseline.hpp"

#include <cmath>

namespace fdpa {

double map_sinr_hd(double gamma_linear) {
  return (1.0 + gamma_linear) * (1.0 + gamma_linear) - 1.0;
}

HdDownlink solve_hd_downlink(const ChannelRealization& ch,
                             const Eigen::VectorXd& gamma_dl_hd,
                             const SolverOptions& opts,
                             CertificateStats* stats) {
  // Downlink-only view: no uplink users, hence no CCI terms and no uplink
  // QoS rows; H_SI is irrelevant without simultaneous reception.
  ChannelRealization dl_only;
  dl_only.h = ch.h;
  dl_only.f.resize(0, ch.num_dl());
  dl_only.h_si = Eigen::MatrixXcd::Zero(ch.nt(), ch.nt());
  dl_only.sigma2_dl = ch.sigma2_dl;
  dl_only.sigma2_ul = ch.sigma2_ul;

  Targets targets;
  targets.gamma_dl = gamma_dl_hd;
  targets.gamma_ul.resize(0);

  ReceiveBank empty_bank;
  const ConicProblem prob = build_problem1(dl_only, empty_bank, targets);
  const SolverResult result = solve(prob, opts);

  HdDownlink out;
  out.status = result.status;
  if (result.status != SolveStatus::optimal) return out;
  out.recovery = extract(result);
  if (stats) stats->absorb(result, verify_kkt(result, prob));
  out.power = out.recovery.dl_power;
  out.ok = out.recovery.rank_one_ok;
  return out;
}

Eigen::VectorXd hd_uplink_iteration(const ChannelRealization& ch,
                                    const Eigen::VectorXd& gamma_ul_hd,
                                    const Eigen::VectorXd& p) {
  const int nt = ch.nt();
  const int j_users = ch.num_ul();
  Eigen::MatrixXcd cov = ch.sigma2_ul * Eigen::MatrixXcd::Identity(nt, nt);
  for (int r = 0; r < j_users; ++r) {
    const auto& gr = ch.g[static_cast<std::size_t>(r)];
    cov += p(r) * (gr * gr.adjoint());
  }
  const Eigen::LLT<Eigen::MatrixXcd> llt(cov);

  Eigen::VectorXd next(j_users);
  for (int j = 0; j < j_users; ++j) {
    const auto& gj = ch.g[static_cast<std::size_t>(j)];
    const double q = (gj.adjoint() * llt.solve(gj)).real()(0, 0);
    // Remove user j's own contribution from the covariance inverse.
    const double excl = q / (1.0 - p(j) * q);
    next(j) = gamma_ul_hd(j) / excl;
  }
  return next;
}

HdUplink solve_hd_uplink(const ChannelRealization& ch,
                         const Eigen::VectorXd& gamma_ul_hd) {
  const int j_users = ch.num_ul();
  HdUplink out;
  out.p = Eigen::VectorXd::Zero(j_users);
  if (j_users == 0) {
    out.converged = true;
    return out;
  }
  constexpr int kMaxIters = 10000;
  constexpr double kPowerCap = 1e6;  // watts
  for (int it = 1; it <= kMaxIters; ++it) {
    const Eigen::VectorXd next = hd_uplink_iteration(ch, gamma_ul_hd, out.p);
    out.iterations = it;
    const double rel =
        ((next - out.p).cwiseAbs().array() / (next.cwiseAbs().array() + 1e-300))
            .maxCoeff();
    out.p = next;
    if (out.p.maxCoeff() > kPowerCap || !out.p.allFinite()) {
      out.converged = false;
      return out;
    }
    if (rel < 1e-10) {
      out.converged = true;
      return out;
    }
  }
  out.converged = false;
  return out;
}

HdPoint hd_point(const ChannelRealization& ch, const Targets& fd_targets,
                 const SolverOptions& opts, CertificateStats* stats) {
  HdPoint pt;
  pt.dl_sinr_target_hd = fd_targets.gamma_dl.unaryExpr(&map_sinr_hd);
  pt.ul_sinr_target_hd = fd_targets.gamma_ul.unaryExpr(&map_sinr_hd);

  const HdDownlink dl = solve_hd_downlink(ch, pt.dl_sinr_target_hd, opts, stats);
  if (!dl.ok) {
    pt.note = std::string("HD downlink: ") + status_name(dl.status);
    return pt;
  }
  const HdUplink ul = solve_hd_uplink(ch, pt.ul_sinr_target_hd);
  if (!ul.converged) {
    pt.note = "HD uplink infeasible";
    return pt;
  }
  pt.dl_power = 0.5 * dl.power;
  pt.ul_power = 0.5 * (ul.p.size() ? ul.p.sum() : 0.0);
  pt.feasible = true;
  return pt;
}

}  // namespace fdpa
