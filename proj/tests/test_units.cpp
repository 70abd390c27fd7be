// SPDX-License-Identifier: Apache-2.0

#include "fdpa/units.hpp"

#include <doctest.h>

#include "fdpa/rng.hpp"

using namespace fdpa;

TEST_CASE("decibel conversions") {
  CHECK(db_to_linear(0.0) == doctest::Approx(1.0));
  CHECK(db_to_linear(10.0) == doctest::Approx(10.0));
  CHECK(db_to_linear(-80.0) == doctest::Approx(1e-8));

  CHECK(dbm_to_watts(0.0) == doctest::Approx(1e-3));
  CHECK(dbm_to_watts(30.0) == doctest::Approx(1.0));
  CHECK(dbm_to_watts(-110.0) == doctest::Approx(1e-14));
}

TEST_CASE("round trip over [-200, 200]") {
  StreamRng rng(7, 0, StreamKind::generic);
  for (int i = 0; i < 2000; ++i) {
    const double x = rng.uniform(-200.0, 200.0);
    CHECK(linear_to_db(db_to_linear(x)) == doctest::Approx(x).epsilon(1e-12));
    CHECK(watts_to_dbm(dbm_to_watts(x)) == doctest::Approx(x).epsilon(1e-12));
  }
}
