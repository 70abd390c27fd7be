// SPDX-License-Identifier: Apache-2.0

#include "fdpa/config.hpp"

#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "fdpa/units.hpp"
#include "test_util.hpp"

using namespace fdpa;

namespace {
bool mentions(const std::vector<std::string>& errors, const std::string& what) {
  return std::any_of(errors.begin(), errors.end(), [&](const std::string& e) {
    return e.find(what) != std::string::npos;
  });
}
}  // namespace

TEST_CASE("defaults are the Table-I scenario and validate cleanly") {
  const SystemConfig cfg = test::table1_config(10, 3, 8);
  CHECK(validate(cfg).empty());
  CHECK(cfg.carrier_frequency == doctest::Approx(1.9e9));
  CHECK(cfg.si_cancellation == doctest::Approx(-80.0));
  CHECK(cfg.noise_power_dl == doctest::Approx(-83.0));
  CHECK(cfg.noise_power_ul == doctest::Approx(-110.0));
  CHECK(cfg.sinr_target_dl_linear(0) == doctest::Approx(10.0));
  CHECK(cfg.sinr_target_ul_linear(0) == doctest::Approx(db_to_linear(6.0)));
}

TEST_CASE("validation reports every violation with field names") {
  SystemConfig cfg = test::table1_config(4, 3, 8);  // N_T < J
  cfg.reference_distance = 250.0;
  cfg.max_distance = 30.0;
  cfg.noise_power_dl = std::numeric_limits<double>::infinity();
  const auto errors = validate(cfg);
  CHECK(errors.size() >= 3);
  CHECK(mentions(errors, "N_T >= J"));
  CHECK(mentions(errors, "reference_distance"));
  CHECK(mentions(errors, "noise_power_dl"));

  // Purity: same input, identical output.
  CHECK(validate(cfg) == errors);
}

TEST_CASE("sweep config grid invariant") {
  SweepConfig sweep;
  sweep.lambda_step = 0.01;
  CHECK(validate(sweep).empty());
  sweep.lambda_step = 0.03;  // does not divide 1
  CHECK(!validate(sweep).empty());
  sweep.lambda_step = 0.0;
  CHECK(!validate(sweep).empty());
}

TEST_CASE("config file parsing, comments, and unknown keys") {
  SystemConfig sys;
  SweepConfig sweep;
  std::istringstream in(
      "# scenario\n"
      "num_antennas = 12\n"
      "sinr_target_dl = 8, 10, 12  # per user\n"
      "nt_list = 8,12\n"
      "master_seed = 42\n");
  load_config_stream(in, sys, sweep, "test");
  CHECK(sys.num_antennas == 12);
  REQUIRE(sys.sinr_target_dl.size() == 3);
  CHECK(sys.sinr_target_dl[1] == doctest::Approx(10.0));
  CHECK(sweep.nt_list == std::vector<int>{8, 12});
  CHECK(sweep.master_seed == 42);

  std::istringstream bad("frequency = 1e9\n");
  CHECK_THROWS_AS(load_config_stream(bad, sys, sweep, "test"), ConfigError);
  std::istringstream malformed("num_antennas 12\n");
  CHECK_THROWS_AS(load_config_stream(malformed, sys, sweep, "test"), ConfigError);
}

TEST_CASE("dump round-trips through the parser") {
  SystemConfig sys = test::table1_config(12, 2, 5);
  sys.sinr_target_dl = {7.5, 9.25};
  SweepConfig sweep;
  sweep.lambda_step = 0.05;
  sweep.master_seed = 1234567890123ULL;

  std::istringstream in(dump_config(sys, sweep));
  SystemConfig sys2;
  SweepConfig sweep2;
  load_config_stream(in, sys2, sweep2, "dump");
  CHECK(sys2.num_antennas == 12);
  CHECK(sys2.sinr_target_dl == sys.sinr_target_dl);
  CHECK(sweep2.lambda_step == doctest::Approx(0.05));
  CHECK(sweep2.master_seed == sweep.master_seed);
}
