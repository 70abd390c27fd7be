// SPDX-License-Identifier: Apache-2.0

#include "fdpa/channel.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

#include "fdpa/units.hpp"
#include "test_util.hpp"

using namespace fdpa;

TEST_CASE("path loss anchored at free space, exponent beyond") {
  const SystemConfig cfg = test::table1_config();
  // Direct evaluation of 20 log10(4 pi d f / c) at the 30 m reference.
  CHECK(path_loss_db(30.0, cfg, false) == doctest::Approx(67.57).epsilon(3e-4));
  CHECK(path_loss_db(250.0, cfg, false) == doctest::Approx(100.72).epsilon(5e-4));
  CHECK(path_loss_db(250.0, cfg, true) == doctest::Approx(90.72).epsilon(6e-4));
  CHECK_THROWS_AS(path_loss_db(10.0, cfg, false), std::domain_error);
}

TEST_CASE("layout: determinism, range, and uniform mean radius") {
  const SystemConfig cfg = test::table1_config();
  StreamRng r1(9, 4, StreamKind::layout);
  StreamRng r2(9, 4, StreamKind::layout);
  const UserLayout a = draw_layout(cfg, r1);
  const UserLayout b = draw_layout(cfg, r2);
  for (std::size_t i = 0; i < a.dl_positions.size(); ++i) {
    CHECK(a.dl_positions[i].radius == b.dl_positions[i].radius);
    CHECK(a.dl_positions[i].angle == b.dl_positions[i].angle);
  }

  SystemConfig one = cfg;
  one.num_dl_users = 1;
  one.num_ul_users = 0;
  StreamRng rng(3, 0, StreamKind::layout);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const UserLayout l = draw_layout(one, rng);
    const double r = l.dl_positions[0].radius;
    REQUIRE(r >= 30.0);
    REQUIRE(r <= 250.0);
    sum += r;
  }
  CHECK(sum / n == doctest::Approx(140.0).epsilon(0.01));
}

TEST_CASE("generation is bitwise deterministic in (seed, drop)") {
  const SystemConfig cfg = test::table1_config(6, 2, 3);
  const ChannelRealization a = draw_realization(cfg, 77, 5);
  const ChannelRealization b = draw_realization(cfg, 77, 5);
  CHECK(a.h[1] == b.h[1]);
  CHECK(a.g[2] == b.g[2]);
  CHECK(a.f == b.f);
  CHECK(a.h_si == b.h_si);
  const ChannelRealization c = draw_realization(cfg, 77, 6);
  CHECK(a.h[0] != c.h[0]);
}

TEST_CASE("self-interference ensemble power matches the cancellation factor") {
  const SystemConfig cfg = test::table1_config(10, 1, 1);
  double sum = 0.0;
  int count = 0;
  for (int drop = 0; drop < 120; ++drop) {
    const ChannelRealization ch = draw_realization(cfg, 11, drop);
    sum += ch.h_si.squaredNorm();
    count += static_cast<int>(ch.h_si.size());
  }
  CHECK(sum / count == doctest::Approx(1e-8).epsilon(0.02));
}

TEST_CASE("fading has unit mean power over the path gain") {
  SystemConfig cfg = test::table1_config(10, 1, 0);
  // Pin the user to a known distance via a handmade layout.
  UserLayout layout;
  layout.dl_positions.push_back({100.0, 0.3});
  const double gain = db_to_linear(-path_loss_db(100.0, cfg, true));
  double sum = 0.0;
  int count = 0;
  for (int drop = 0; drop < 1000; ++drop) {
    const ChannelRealization ch = generate(layout, cfg, 13, drop);
    sum += ch.h[0].squaredNorm();
    count += static_cast<int>(ch.h[0].size());
  }
  CHECK(sum / count == doctest::Approx(gain).epsilon(0.02));
}

TEST_CASE("rician moments of the scaled SI entries") {
  const SystemConfig cfg = test::table1_config(10, 1, 1);
  const double kappa = db_to_linear(cfg.rician_factor);
  const double expected_mean = std::sqrt(kappa / (kappa + 1.0));
  std::complex<double> mean = 0.0;
  double mean_sq = 0.0;
  int count = 0;
  const double amp = std::sqrt(1e-8);
  for (int drop = 0; drop < 120; ++drop) {
    const ChannelRealization ch = draw_realization(cfg, 21, drop);
    for (int r = 0; r < ch.h_si.rows(); ++r)
      for (int c = 0; c < ch.h_si.cols(); ++c) {
        mean += ch.h_si(r, c) / amp;
        mean_sq += std::norm(ch.h_si(r, c) / amp);
        ++count;
      }
  }
  mean /= count;
  mean_sq /= count;
  CHECK(mean.real() == doctest::Approx(expected_mean).epsilon(0.02));
  CHECK(std::abs(mean.imag()) < 0.02);
  CHECK(mean_sq == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("downlink and uplink fades are statistically independent") {
  const SystemConfig cfg = test::table1_config(10, 1, 1);
  std::complex<double> cross = 0.0;
  double var_h = 0.0, var_g = 0.0;
  int n = 0;
  for (int drop = 0; drop < 500; ++drop) {
    const ChannelRealization ch = draw_realization(cfg, 31, drop);
    for (int i = 0; i < ch.nt(); ++i) {
      cross += ch.h[0](i) * std::conj(ch.g[0](i));
      var_h += std::norm(ch.h[0](i));
      var_g += std::norm(ch.g[0](i));
      ++n;
    }
  }
  const double corr = std::abs(cross) / std::sqrt(var_h * var_g);
  CHECK(corr < 3.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("realization dump is self-describing") {
  const SystemConfig cfg = test::table1_config(3, 2, 1);
  const ChannelRealization ch = draw_realization(cfg, 5, 0);
  std::ostringstream os;
  dump_realization(os, ch);
  const std::string text = os.str();
  CHECK(text.find("h 3 2") != std::string::npos);
  CHECK(text.find("g 3 1") != std::string::npos);
  CHECK(text.find("h_si 3 3") != std::string::npos);
}
