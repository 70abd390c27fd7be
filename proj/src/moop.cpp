// SPDX-License-Identifier: Apache-2.0

#include "fdpa/moop.hpp"

#include <cmath>
#include <ostream>

#include "fdpa/units.hpp"

namespace fdpa {

void CertificateStats::absorb(const SolverResult& result, const KktCheck& chk) {
  ++solves;
  gap_max = std::max(gap_max, result.gap);
  residual_primal_max = std::max(residual_primal_max, result.residual_primal);
  residual_dual_max = std::max(residual_dual_max, result.residual_dual);
  complementarity_max = std::max(complementarity_max, chk.complementarity_max);
  stationarity_max = std::max(stationarity_max, chk.stationarity_max);
  dual_sign_min = std::min(dual_sign_min, chk.dual_sign_min);
  theta_sum_err_max = std::max(theta_sum_err_max, chk.theta_sum_err);
}

void CertificateStats::merge(const CertificateStats& o) {
  solves += o.solves;
  gap_max = std::max(gap_max, o.gap_max);
  residual_primal_max = std::max(residual_primal_max, o.residual_primal_max);
  residual_dual_max = std::max(residual_dual_max, o.residual_dual_max);
  complementarity_max = std::max(complementarity_max, o.complementarity_max);
  stationarity_max = std::max(stationarity_max, o.stationarity_max);
  dual_sign_min = std::min(dual_sign_min, o.dual_sign_min);
  theta_sum_err_max = std::max(theta_sum_err_max, o.theta_sum_err_max);
}

std::string Anchors::failure() const {
  std::string out;
  if (status_p1 != SolveStatus::optimal)
    out += std::string("problem1: ") + status_name(status_p1);
  if (status_p2 != SolveStatus::optimal) {
    if (!out.empty()) out += "; ";
    out += std::string("problem2: ") + status_name(status_p2);
  }
  return out;
}

Anchors compute_anchors(const ChannelRealization& ch, const ReceiveBank& bank,
                        const Targets& targets, const SolverOptions& opts) {
  Anchors a;
  const SolverResult r1 = solve(build_problem1(ch, bank, targets), opts);
  a.status_p1 = r1.status;
  if (r1.status == SolveStatus::optimal) a.q1 = r1.primal_objective;
  const SolverResult r2 = solve(build_problem2(ch, bank, targets), opts);
  a.status_p2 = r2.status;
  if (r2.status == SolveStatus::optimal) a.q2 = r2.primal_objective;
  return a;
}

ParetoPoint solve_tcheby_point(const ChannelRealization& ch,
                               const ReceiveBank& bank, const Targets& targets,
                               const Eigen::Vector2d& lambda,
                               const Eigen::Vector2d& q_star,
                               const SolverOptions& opts,
                               CertificateStats* stats) {
  ParetoPoint pt;
  pt.lambda = lambda;

  TchebyParams tch;
  tch.lambda = lambda;
  tch.q_star = q_star;
  const ConicProblem prob = build_problem3(ch, bank, targets, tch);
  const SolverResult result = solve(prob, opts);
  pt.status = result.status;
  if (result.status != SolveStatus::optimal) {
    pt.note = result.message.empty() ? status_name(result.status) : result.message;
    return pt;
  }

  const RecoveryReport rep = extract(result);
  const KktCheck chk = verify_kkt(result, prob);
  const EvaluationReport ev = evaluate(ch, bank, rep, targets);
  if (stats) stats->absorb(result, chk);

  pt.dl_power = rep.dl_power;
  pt.ul_power = rep.ul_power;
  pt.t_value = result.t;
  pt.eigen_ratio_max = rep.eigen_ratio_max;
  pt.certificate_ok = rep.rank_one_ok && chk.passed && ev.feasible;
  if (!rep.rank_one_ok)
    pt.note = rep.message;
  else if (!chk.passed)
    pt.note = chk.failure;
  else if (!ev.feasible)
    pt.note = "recovered solution infeasible";
  return pt;
}

Frontier sweep(const ChannelRealization& ch, const ReceiveBank& bank,
               const Targets& targets, double lambda_step,
               const SolverOptions& opts, bool parallel) {
  Frontier fr;
  const Anchors a = compute_anchors(ch, bank, targets, opts);
  if (!a.ok()) {
    fr.feasible = false;
    fr.note = a.failure();
    return fr;
  }
  fr.feasible = true;
  fr.anchors = Eigen::Vector2d(a.q1, a.q2);

  const int n = static_cast<int>(std::llround(1.0 / lambda_step));
  fr.points.resize(static_cast<std::size_t>(n) + 1);
  std::vector<CertificateStats> stats(static_cast<std::size_t>(n) + 1);

#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int i = 0; i <= n; ++i) {
    const double l1 = (i == n) ? 1.0 : i * lambda_step;
    const Eigen::Vector2d lambda(l1, 1.0 - l1);
    fr.points[static_cast<std::size_t>(i)] = solve_tcheby_point(
        ch, bank, targets, lambda, fr.anchors, opts,
        &stats[static_cast<std::size_t>(i)]);
  }
  for (const auto& s : stats) fr.cert.merge(s);
  return fr;
}

const char* pareto_status_name(const ParetoPoint& pt) {
  if (pt.status != SolveStatus::optimal) return status_name(pt.status);
  if (pt.certificate_ok) return "optimal";
  if (pt.note == "rank-one recovery failed") return "rank_fail";
  if (pt.note == "recovered solution infeasible") return "eval_fail";
  return "kkt_fail";
}

void write_frontier_csv(std::ostream& os, const Frontier& fr) {
  os << "lambda1,lambda2,dl_power_dbm,ul_power_dbm,t,status,max_eigen_ratio\n";
  os.precision(12);
  for (const ParetoPoint& pt : fr.points) {
    os << pt.lambda(0) << "," << pt.lambda(1) << ",";
    if (pt.status == SolveStatus::optimal)
      os << watts_to_dbm(pt.dl_power) << "," << watts_to_dbm(pt.ul_power) << ","
         << pt.t_value;
    else
      os << "NA,NA,NA";
    os << "," << pareto_status_name(pt) << "," << pt.eigen_ratio_max << "\n";
  }
}

}  // namespace fdpa
