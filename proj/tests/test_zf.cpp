// SPDX-License-Identifier: Apache-2.0

#include "fdpa/zf.hpp"

#include <doctest.h>

#include <cmath>

#include "test_util.hpp"

using namespace fdpa;

namespace {
Eigen::VectorXcd cvec2(std::complex<double> a, std::complex<double> b) {
  Eigen::VectorXcd v(2);
  v << a, b;
  return v;
}
}  // namespace

TEST_CASE("single-user zero forcing is the matched filter over ||g||^2") {
  const std::vector<Eigen::VectorXcd> g = {cvec2(2.0, 0.0)};
  const ReceiveBank bank = build_zf(g);
  CHECK(bank.v[0](0).real() == doctest::Approx(0.5));
  CHECK(std::abs(bank.v[0](1)) < 1e-15);
}

TEST_CASE("orthonormal uplink channels are their own bank") {
  const std::vector<Eigen::VectorXcd> g = {cvec2(1.0, 0.0), cvec2(0.0, 1.0)};
  const ReceiveBank bank = build_zf(g);
  CHECK((bank.v[0] - cvec2(1.0, 0.0)).norm() < 1e-14);
  CHECK((bank.v[1] - cvec2(0.0, 1.0)).norm() < 1e-14);
}

TEST_CASE("zero-forcing property over 100 seeded draws") {
  for (int seed = 0; seed < 100; ++seed) {
    const auto inst = test::make_instance(1000 + seed, 0, 10, 3, 8);
    double max_cross = 0.0, max_diag = 0.0;
    for (int j = 0; j < 8; ++j)
      for (int r = 0; r < 8; ++r) {
        const double v =
            std::abs(inst.ch.g[static_cast<std::size_t>(r)].dot(
                inst.bank.v[static_cast<std::size_t>(j)]) -
                     (r == j ? 1.0 : 0.0));
        if (r == j)
          max_diag = std::max(max_diag, v);
        else
          max_cross = std::max(max_cross, v);
      }
    CHECK(max_cross < 1e-10);
    CHECK(max_diag < 1e-10);
  }
}

TEST_CASE("degenerate uplink channels fail loudly") {
  const Eigen::VectorXcd g0 = cvec2(1.0, 0.5);
  const std::vector<Eigen::VectorXcd> g = {g0, (1.0 + 1e-15) * g0};
  CHECK_THROWS_WITH_AS(build_zf(g), "degenerate uplink channels",
                       std::runtime_error);
}

TEST_CASE("downlink SINR evaluation") {
  ChannelRealization ch;
  ch.h.push_back(cvec2(1.0, 0.0));
  ch.f.resize(0, 1);
  ch.h_si = Eigen::MatrixXcd::Zero(2, 2);
  ch.sigma2_dl = Eigen::VectorXd::Ones(1);
  ch.sigma2_ul = 1.0;

  CandidateSolution sol;
  sol.w.push_back(cvec2(2.0, 0.0));
  sol.p.resize(0);
  CHECK(sinr_downlink(ch, sol)(0) == doctest::Approx(4.0));

  // Add an uplink user with P = 10, |f|^2 = 0.1: CCI term = 1.
  ch.f.resize(1, 1);
  ch.f(0, 0) = std::sqrt(0.1);
  ch.g.push_back(cvec2(0.0, 1.0));
  sol.p = Eigen::VectorXd::Constant(1, 10.0);
  CHECK(sinr_downlink(ch, sol)(0) == doctest::Approx(2.0));

  // Second stream orthogonal to h_1 adds no multiuser interference.
  ch.h.push_back(cvec2(0.0, 1.0));
  ch.f.conservativeResize(1, 2);
  ch.f(0, 1) = 0.0;
  ch.sigma2_dl = Eigen::VectorXd::Ones(2);
  sol.w.push_back(cvec2(0.0, 3.0));
  const Eigen::VectorXd sinr = sinr_downlink(ch, sol);
  CHECK(sinr(0) == doctest::Approx(2.0));  // unchanged: w_2 orthogonal to h_1
}

TEST_CASE("uplink SINR evaluation with self-interference leakage") {
  ChannelRealization ch;
  ch.g.push_back(cvec2(0.0, 1.0));
  ch.f.resize(1, 0);
  ch.sigma2_dl.resize(0);
  ch.sigma2_ul = 1.0;
  const double c = 0.7;
  ch.h_si = c * Eigen::MatrixXcd::Identity(2, 2);

  const ReceiveBank bank = build_zf(ch.g);
  CandidateSolution sol;
  sol.p = Eigen::VectorXd::Constant(1, 5.0);
  CHECK(sinr_uplink(ch, bank, sol)(0) == doctest::Approx(5.0));

  // Downlink beam orthogonal to v: no leakage.
  ch.h.push_back(cvec2(1.0, 0.0));
  ch.sigma2_dl = Eigen::VectorXd::Ones(1);
  const double beta = 2.0;
  sol.w.push_back(cvec2(beta, 0.0));
  CHECK(sinr_uplink(ch, bank, sol)(0) == doctest::Approx(5.0));

  // Beam aligned with v: leakage c^2 beta^2.
  sol.w[0] = cvec2(0.0, beta);
  CHECK(sinr_uplink(ch, bank, sol)(0) ==
        doctest::Approx(5.0 / (c * c * beta * beta + 1.0)));
}

TEST_CASE("beamformer scaling moves signal and interference together") {
  const auto inst = test::make_instance(5, 0, 6, 3, 2);
  CandidateSolution sol;
  for (int k = 0; k < 3; ++k)
    sol.w.push_back(inst.ch.h[static_cast<std::size_t>(k)] * 1e4);
  sol.p = Eigen::VectorXd::Constant(2, 1e-6);

  const Eigen::VectorXd base = sinr_downlink(inst.ch, sol);
  const double s = 3.0;
  CandidateSolution scaled = sol;
  for (auto& w : scaled.w) w *= s;
  const Eigen::VectorXd up = sinr_downlink(inst.ch, scaled);
  // Signal and MUI scale by s^2; CCI and noise do not, so SINR rises but by
  // less than s^2.
  for (int k = 0; k < 3; ++k) {
    CHECK(up(k) > base(k));
    CHECK(up(k) < s * s * base(k) * (1.0 + 1e-12));
  }
}

TEST_CASE("lifted and vector evaluations agree; ZF kills uplink-uplink terms") {
  const auto inst = test::make_instance(6, 1, 10, 3, 8);
  CandidateSolution vec_sol;
  for (int k = 0; k < 3; ++k)
    vec_sol.w.push_back(inst.ch.h[static_cast<std::size_t>(k)] * 5e3);
  vec_sol.p = Eigen::VectorXd::Constant(8, 2e-6);

  CandidateSolution lifted = vec_sol;
  for (const auto& w : vec_sol.w) lifted.w_lifted.push_back(w * w.adjoint());

  const Eigen::VectorXd a = sinr_downlink(inst.ch, vec_sol);
  const Eigen::VectorXd b = sinr_downlink(inst.ch, lifted);
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-10 * a.maxCoeff());

  const Eigen::VectorXd ua = sinr_uplink(inst.ch, inst.bank, vec_sol);
  const Eigen::VectorXd ub = sinr_uplink(inst.ch, inst.bank, lifted);
  for (int j = 0; j < 8; ++j)
    CHECK(ua(j) == doctest::Approx(ub(j)).epsilon(1e-10));

  // Uplink-uplink interference vanished to numerical precision: removing the
  // other users' powers changes nothing.
  CandidateSolution alone = vec_sol;
  for (int j = 0; j < 8; ++j) {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(8);
    p(j) = vec_sol.p(j);
    alone.p = p;
    const double with_others = ua(j);
    const double solo = sinr_uplink(inst.ch, inst.bank, alone)(j);
    CHECK(std::abs(with_others - solo) / solo < 1e-9);
  }
}
