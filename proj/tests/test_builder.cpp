// SPDX-License-Identifier: Apache-2.0

#include "fdpa/sdp_builder.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

#include "fdpa/conic.hpp"
#include "test_util.hpp"

using namespace fdpa;

namespace {

/// A random strictly-positive candidate in the lifted space.
struct Candidate {
  std::vector<Eigen::MatrixXcd> w;
  Eigen::VectorXd p;
};

Candidate random_candidate(const ChannelRealization& ch, std::uint64_t seed,
                           bool rank_one) {
  StreamRng rng(seed, 0, StreamKind::generic);
  Candidate cand;
  for (int k = 0; k < ch.num_dl(); ++k) {
    Eigen::VectorXcd w(ch.nt());
    for (int i = 0; i < ch.nt(); ++i) w(i) = 1e-2 * rng.complex_normal();
    if (rank_one) {
      cand.w.push_back(w * w.adjoint());
    } else {
      Eigen::MatrixXcd a(ch.nt(), ch.nt());
      for (int r = 0; r < ch.nt(); ++r)
        for (int c = 0; c < ch.nt(); ++c) a(r, c) = rng.complex_normal();
      cand.w.push_back(1e-4 * (a * a.adjoint()) + w * w.adjoint());
    }
  }
  cand.p.resize(ch.num_ul());
  for (int j = 0; j < ch.num_ul(); ++j) cand.p(j) = 1e-5 * rng.uniform_unit();
  return cand;
}

/// Direct evaluation of the downlink QoS inequality margin from the SINR
/// definition (signal/target minus interference-plus-noise), lifted form.
double direct_dl_margin(const ChannelRealization& ch, const Targets& targets,
                        const Candidate& cand, int k) {
  const auto& hk = ch.h[static_cast<std::size_t>(k)];
  const auto quad = [&](const Eigen::MatrixXcd& w) {
    return (hk.adjoint() * w * hk).real()(0, 0);
  };
  double lhs = quad(cand.w[static_cast<std::size_t>(k)]) / targets.gamma_dl(k);
  for (int m = 0; m < ch.num_dl(); ++m)
    if (m != k) lhs -= quad(cand.w[static_cast<std::size_t>(m)]);
  for (int j = 0; j < ch.num_ul(); ++j)
    lhs -= cand.p(j) * std::norm(ch.f(j, k));
  return lhs - ch.sigma2_dl(k);
}

/// Same for the uplink QoS inequality.
double direct_ul_margin(const ChannelRealization& ch, const ReceiveBank& bank,
                        const Targets& targets, const Candidate& cand, int j) {
  const auto& vj = bank.v[static_cast<std::size_t>(j)];
  double lhs = cand.p(j) *
               std::norm(ch.g[static_cast<std::size_t>(j)].dot(vj)) /
               targets.gamma_ul(j);
  for (int r = 0; r < ch.num_ul(); ++r)
    if (r != j)
      lhs -= cand.p(r) * std::norm(ch.g[static_cast<std::size_t>(r)].dot(vj));
  const Eigen::VectorXcd leak = ch.h_si.adjoint() * vj;
  for (int k = 0; k < ch.num_dl(); ++k)
    lhs -= (leak.adjoint() * cand.w[static_cast<std::size_t>(k)] * leak)
               .real()(0, 0);
  return lhs - ch.sigma2_ul * vj.squaredNorm();
}

}  // namespace

TEST_CASE("problem 1 for a lone downlink user drops to a single trace row") {
  ChannelRealization ch;
  ch.h.push_back((Eigen::VectorXcd(2) << 1.0, 0.0).finished());
  ch.f.resize(0, 1);
  ch.h_si = Eigen::MatrixXcd::Zero(2, 2);
  ch.sigma2_dl = Eigen::VectorXd::Ones(1);
  ch.sigma2_ul = 1.0;
  Targets t;
  t.gamma_dl = Eigen::VectorXd::Constant(1, 3.0);
  t.gamma_ul.resize(0);

  const ConicProblem prob = build_problem1(ch, ReceiveBank{}, t);
  REQUIRE(prob.rows.size() == 1);
  CHECK(prob.obj_t == 0.0);
  CHECK(!prob.has_t);
  CHECK(prob.obj_w[0].isApprox(Eigen::MatrixXcd::Identity(2, 2)));
  // Row: <H/3, W> >= 1 after normalization by sigma^2 = 1.
  CHECK(prob.rows[0].rhs == doctest::Approx(1.0));
  CHECK(prob.rows[0].scale == doctest::Approx(1.0));
  CHECK(prob.rows[0].w_coeff[0](0, 0).real() == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("constraint count is K + J and shared across problems 1 and 2") {
  const auto inst = test::make_instance(42, 0, 10, 3, 8);
  const ConicProblem p1 = build_problem1(inst.ch, inst.bank, inst.targets);
  const ConicProblem p2 = build_problem2(inst.ch, inst.bank, inst.targets);
  CHECK(p1.rows.size() == 11);
  CHECK(p2.rows.size() == 11);
  for (std::size_t i = 0; i < p1.rows.size(); ++i) {
    CHECK(p1.rows[i].rhs == p2.rows[i].rhs);
    CHECK(p1.rows[i].p_coeff == p2.rows[i].p_coeff);
    for (int k = 0; k < 3; ++k)
      CHECK(p1.rows[i].w_coeff[static_cast<std::size_t>(k)] ==
            p2.rows[i].w_coeff[static_cast<std::size_t>(k)]);
  }
  // Problem 2's objective never touches the lifted blocks.
  for (const auto& c : p2.obj_w) CHECK(c.norm() == 0.0);
  CHECK(p2.obj_p.sum() == doctest::Approx(8.0));
}

TEST_CASE("assembled rows reproduce the SINR-form inequalities") {
  const auto inst = test::make_instance(43, 1, 10, 3, 8);
  const ConicProblem prob = build_problem1(inst.ch, inst.bank, inst.targets);
  const Candidate cand = random_candidate(inst.ch, 7, false);

  for (const ConstraintRow& row : prob.rows) {
    const double assembled = row_residual_unscaled(row, cand.w, cand.p, 0.0);
    const double direct =
        row.kind == RowKind::qos_dl
            ? direct_dl_margin(inst.ch, inst.targets, cand, row.index)
            : direct_ul_margin(inst.ch, inst.bank, inst.targets, cand, row.index);
    const double scale = std::abs(direct) + std::abs(row.rhs * row.scale);
    CHECK(std::abs(assembled - direct) <= 1e-10 * scale);
  }
}

TEST_CASE("lifted rank-one candidates match the unlifted constraints") {
  const auto inst = test::make_instance(44, 2, 8, 2, 4);
  const ConicProblem prob = build_problem1(inst.ch, inst.bank, inst.targets);
  const Candidate cand = random_candidate(inst.ch, 11, true);

  // Unlifted residuals via the SINR evaluators on the vector solution.
  CandidateSolution vec;
  vec.p = cand.p;
  for (const auto& wk : cand.w) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(wk);
    vec.w.push_back(std::sqrt(es.eigenvalues()(es.eigenvalues().size() - 1)) *
                    es.eigenvectors().col(es.eigenvalues().size() - 1));
  }
  const Eigen::VectorXd sinr_dl = sinr_downlink(inst.ch, vec);
  const Eigen::VectorXd sinr_ul = sinr_uplink(inst.ch, inst.bank, vec);

  for (const ConstraintRow& row : prob.rows) {
    const double assembled = row_residual_unscaled(row, cand.w, cand.p, 0.0);
    // Reconstruct margin = (sinr/target - 1) * denominator.
    double direct;
    if (row.kind == RowKind::qos_dl) {
      const int k = row.index;
      const double signal =
          std::norm(inst.ch.h[static_cast<std::size_t>(k)].dot(
              vec.w[static_cast<std::size_t>(k)]));
      const double denom = signal / sinr_dl(k);
      direct = signal / inst.targets.gamma_dl(k) - denom;
    } else {
      const int j = row.index;
      const double signal =
          cand.p(j) * std::norm(inst.ch.g[static_cast<std::size_t>(j)].dot(
                          inst.bank.v[static_cast<std::size_t>(j)]));
      const double denom = signal / sinr_ul(j);
      direct = signal / inst.targets.gamma_ul(j) - denom;
    }
    const double scale =
        std::abs(direct) + std::abs(row.rhs * row.scale) + 1e-300;
    CHECK(std::abs(assembled - direct) <= 1e-9 * scale);
  }
}

TEST_CASE("coefficient matrices stay Hermitian through assembly") {
  const auto inst = test::make_instance(45, 3, 12, 3, 8);
  TchebyParams tch;
  tch.lambda = Eigen::Vector2d(0.3, 0.7);
  tch.q_star = Eigen::Vector2d(1e-3, 1e-6);
  const ConicProblem prob = build_problem3(inst.ch, inst.bank, inst.targets, tch);
  double worst = 0.0;
  for (const ConstraintRow& row : prob.rows)
    for (const auto& m : row.w_coeff)
      worst = std::max(worst, (m - m.adjoint()).cwiseAbs().maxCoeff());
  CHECK(worst < 1e-14);
}

TEST_CASE("scalarization rows and normalization") {
  const auto inst = test::make_instance(46, 4, 6, 2, 3);
  TchebyParams tch;
  tch.lambda = Eigen::Vector2d(0.25, 0.75);
  tch.q_star = Eigen::Vector2d(2e-3, 4e-6);
  const ConicProblem prob = build_problem3(inst.ch, inst.bank, inst.targets, tch);
  REQUIRE(prob.rows.size() == 7);
  CHECK(prob.has_t);
  CHECK(prob.obj_t == 1.0);

  const ConstraintRow& c6a = prob.rows[5];
  const ConstraintRow& c6b = prob.rows[6];
  CHECK(c6a.kind == RowKind::tcheby);
  // Row scaled by |rhs| = lambda_i q_i^*: rhs = -1, t coefficient 1/scale.
  CHECK(c6a.rhs == doctest::Approx(-1.0));
  CHECK(c6a.scale == doctest::Approx(0.25 * 2e-3));
  CHECK(c6a.t_coeff == doctest::Approx(1.0 / c6a.scale));
  CHECK(c6a.w_coeff[0](0, 0).real() * c6a.scale == doctest::Approx(-0.25));
  CHECK(c6b.p_coeff(0) * c6b.scale == doctest::Approx(-0.75));

  // All QoS rows are normalized to unit constants.
  for (int i = 0; i < 5; ++i) CHECK(prob.rows[static_cast<std::size_t>(i)].rhs ==
                                    doctest::Approx(1.0));

  TchebyParams bad;
  bad.lambda = Eigen::Vector2d(0.5, 0.6);
  bad.q_star.setZero();
  CHECK_THROWS_AS(build_problem3(inst.ch, inst.bank, inst.targets, bad),
                  std::invalid_argument);
}

TEST_CASE("problem dump round-trips exactly") {
  const auto inst = test::make_instance(47, 5, 5, 2, 2);
  TchebyParams tch;
  tch.lambda = Eigen::Vector2d(0.5, 0.5);
  tch.q_star = Eigen::Vector2d(1.5e-3, 2.5e-6);
  const ConicProblem prob = build_problem3(inst.ch, inst.bank, inst.targets, tch);

  std::stringstream ss;
  save_problem(ss, prob);
  const ConicProblem back = load_problem(ss);

  CHECK(back.nt == prob.nt);
  CHECK(back.num_dl == prob.num_dl);
  CHECK(back.num_ul == prob.num_ul);
  CHECK(back.has_t == prob.has_t);
  CHECK(back.lambda == prob.lambda);
  REQUIRE(back.rows.size() == prob.rows.size());
  for (std::size_t i = 0; i < prob.rows.size(); ++i) {
    CHECK(back.rows[i].rhs == prob.rows[i].rhs);
    CHECK(back.rows[i].scale == prob.rows[i].scale);
    CHECK(back.rows[i].t_coeff == prob.rows[i].t_coeff);
    for (std::size_t k = 0; k < prob.rows[i].w_coeff.size(); ++k)
      CHECK(back.rows[i].w_coeff[k] == prob.rows[i].w_coeff[k]);
    CHECK(back.rows[i].p_coeff == prob.rows[i].p_coeff);
  }
  for (int k = 0; k < prob.num_dl; ++k) {
    CHECK(back.h_outer[static_cast<std::size_t>(k)] ==
          prob.h_outer[static_cast<std::size_t>(k)]);
    CHECK(back.obj_w[static_cast<std::size_t>(k)] ==
          prob.obj_w[static_cast<std::size_t>(k)]);
  }
}
