// SPDX-License-Identifier: Apache-2.0

#include "fdpa/solver.hpp"

#include <doctest.h>

#include <cmath>

#include "fdpa/recovery.hpp"
#include "test_util.hpp"

using namespace fdpa;

namespace {

/// Bare problem: one nt x nt PSD block, no P variables, rows supplied raw.
ConicProblem psd_only(int nt) {
  ConicProblem prob;
  prob.nt = nt;
  prob.num_dl = 1;
  prob.num_ul = 0;
  prob.obj_w.push_back(Eigen::MatrixXcd::Zero(nt, nt));
  prob.obj_p.resize(0);
  prob.h_outer.push_back(Eigen::MatrixXcd::Zero(nt, nt));
  prob.gamma_dl = Eigen::VectorXd::Ones(1);
  prob.gamma_ul.resize(0);
  return prob;
}

ConstraintRow psd_row(const Eigen::MatrixXcd& coeff, double rhs) {
  ConstraintRow row;
  row.kind = RowKind::qos_dl;
  row.index = 0;
  row.w_coeff.push_back(coeff);
  row.p_coeff.resize(0);
  row.rhs = rhs;
  return row;
}

}  // namespace

TEST_CASE("minimum trace with an active trace floor") {
  ConicProblem prob = psd_only(2);
  prob.obj_w[0] = Eigen::MatrixXcd::Identity(2, 2);
  prob.rows.push_back(psd_row(Eigen::MatrixXcd::Identity(2, 2), 1.0));

  const SolverResult res = solve(prob);
  REQUIRE(res.status == SolveStatus::optimal);
  CHECK(res.primal_objective == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(res.gap <= 1e-7);
  CHECK(res.residual_primal <= 1e-8);
  CHECK(res.residual_dual <= 1e-8);
}

TEST_CASE("weighted trace floor puts all mass on the largest eigenvalue") {
  ConicProblem prob = psd_only(2);
  prob.obj_w[0] = Eigen::MatrixXcd::Identity(2, 2);
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(2, 2);
  a(0, 0) = 2.0;
  a(1, 1) = 1.0;
  prob.rows.push_back(psd_row(a, 1.0));

  const SolverResult res = solve(prob);
  REQUIRE(res.status == SolveStatus::optimal);
  CHECK(res.primal_objective == doctest::Approx(0.5).epsilon(1e-7));
  CHECK(res.w[0](0, 0).real() == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(std::abs(res.w[0](1, 1)) < 1e-7);
}

TEST_CASE("a negative trace floor is primal infeasible with a certificate") {
  ConicProblem prob = psd_only(2);
  prob.rows.push_back(psd_row(-Eigen::MatrixXcd::Identity(2, 2), 1.0));

  const SolverResult res = solve(prob);
  REQUIRE(res.status == SolveStatus::primal_infeasible);
  CHECK(res.infeas_violation >= 1e-6);
  CHECK(res.infeas_residual <= 1e-6);
}

TEST_CASE("unbounded objective yields a dual-infeasibility ray") {
  ConicProblem prob = psd_only(2);
  prob.obj_w[0] = -Eigen::MatrixXcd::Identity(2, 2);  // minimize -Tr(W)
  prob.rows.push_back(psd_row(Eigen::MatrixXcd::Identity(2, 2), 1.0));

  const SolverResult res = solve(prob);
  CHECK(res.status == SolveStatus::dual_infeasible_unbounded);
}

TEST_CASE("single-user uplink power minimization hits the closed form") {
  // K=0, J=1: min P s.t. P |g^H v|^2 / Gamma >= sigma2 ||v||^2.
  ChannelRealization ch;
  ch.g.push_back((Eigen::VectorXcd(2) << 0.0, 2.0).finished());
  ch.f.resize(1, 0);
  ch.h_si = Eigen::MatrixXcd::Zero(2, 2);
  ch.sigma2_dl.resize(0);
  ch.sigma2_ul = 3.0;
  Targets t;
  t.gamma_dl.resize(0);
  t.gamma_ul = Eigen::VectorXd::Constant(1, 2.5);
  const ReceiveBank bank = build_zf(ch.g);

  const SolverResult res = solve(build_problem2(ch, bank, t));
  REQUIRE(res.status == SolveStatus::optimal);
  // P* = Gamma sigma2 / ||g||^2 = 2.5 * 3 / 4.
  CHECK(res.p(0) == doctest::Approx(2.5 * 3.0 / 4.0).epsilon(1e-7));
}

TEST_CASE("deterministic: identical problems give identical results") {
  const auto inst = test::make_instance(90, 0, 8, 2, 4);
  const ConicProblem prob = build_problem1(inst.ch, inst.bank, inst.targets);
  const SolverResult a = solve(prob);
  const SolverResult b = solve(prob);
  REQUIRE(a.status == SolveStatus::optimal);
  REQUIRE(b.status == SolveStatus::optimal);
  CHECK(a.iterations == b.iterations);
  CHECK(a.primal_objective == b.primal_objective);  // bitwise
  for (int k = 0; k < 2; ++k)
    CHECK(a.w[static_cast<std::size_t>(k)] == b.w[static_cast<std::size_t>(k)]);
  CHECK(a.p == b.p);
}

TEST_CASE("full-size scenario solves to target tolerances") {
  const auto inst = test::make_instance(91, 0, 10, 3, 8);
  const ConicProblem prob = build_problem1(inst.ch, inst.bank, inst.targets);
  const SolverResult res = solve(prob);
  REQUIRE(res.status == SolveStatus::optimal);
  CHECK(res.gap <= 1e-7);
  CHECK(res.residual_primal <= 1e-8);
  CHECK(res.residual_dual <= 1e-8);
  CHECK(res.iterations < 100);

  // Feasibility of the reported primal at the original constraints, measured
  // relative to each row's natural scale.
  for (const ConstraintRow& row : prob.rows) {
    const double margin = row_residual_unscaled(row, res.w, res.p, res.t);
    CHECK(margin / row.scale >= -1e-7);
  }
  // Dual sign conditions hold without post-processing.
  CHECK(res.xi.minCoeff() >= -1e-9);
  CHECK(res.psi.minCoeff() >= -1e-9);
}

TEST_CASE("scalarized instances carry the epigraph variable and multipliers") {
  const auto inst = test::make_instance(92, 0, 8, 3, 4);

  // Anchors via the two single-objective solves.
  const SolverResult r1 = solve(build_problem1(inst.ch, inst.bank, inst.targets));
  const SolverResult r2 = solve(build_problem2(inst.ch, inst.bank, inst.targets));
  REQUIRE(r1.status == SolveStatus::optimal);
  REQUIRE(r2.status == SolveStatus::optimal);

  TchebyParams tch;
  tch.lambda = Eigen::Vector2d(0.5, 0.5);
  tch.q_star = Eigen::Vector2d(r1.primal_objective, r2.primal_objective);
  const ConicProblem p3 = build_problem3(inst.ch, inst.bank, inst.targets, tch);
  const SolverResult res = solve(p3);
  REQUIRE(res.status == SolveStatus::optimal);
  CHECK(res.theta.sum() == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(res.theta.minCoeff() >= -1e-9);
  // Epigraph tightness: t* = max_i lambda_i (Q_i - Q_i*).
  double q1 = 0.0;
  for (const auto& wk : res.w) q1 += wk.trace().real();
  const double q2 = res.p.sum();
  const double t_expect = std::max(0.5 * (q1 - tch.q_star(0)),
                                   0.5 * (q2 - tch.q_star(1)));
  CHECK(res.t == doctest::Approx(t_expect).epsilon(1e-6));
}
