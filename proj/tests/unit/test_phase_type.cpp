#include <cmath>

#include <doctest.h>

#include "fracmph/errors.hpp"
#include "fracmph/numerics.hpp"
#include "fracmph/phase_type.hpp"
#include "fracmph/stats.hpp"
#include "unit/helpers.hpp"

using namespace fracmph;

TEST_SUITE("phase_type") {
  TEST_CASE("validation reports every violated invariant") {
    CHECK_THROWS_AS(ph_validate(Vector::Ones(2), Matrix::Zero(2, 3)), ValidationError);
    try {
      ph_validate(Vector{{0.8, 0.5}}, Matrix{{-1.0, 2.0}, {-0.5, 1.0}});
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      CHECK(e.violations().size() >= 3);
      CHECK(e.first().find("pi sums") != std::string::npos);
    }
  }

  TEST_CASE("states that cannot be left are rejected") {
    // state 1 feeds state 0 but only state 0 has an exit: fine
    CHECK_NOTHROW(ph_validate(Vector{{0.5, 0.5}}, Matrix{{-1.0, 0.0}, {1.0, -1.0}}));
    // state 1 is closed: rows sum to zero, never absorbed
    CHECK_THROWS_AS(ph_validate(Vector{{1.0, 0.0}}, Matrix{{-2.0, 1.0}, {0.0, 0.0}}), ValidationError);
    CHECK_THROWS_AS(ph_validate(Vector{{1.0, 0.0}}, Matrix{{-1.0, 1.0}, {1.0, -1.0}}), ValidationError);
  }

  TEST_CASE("exponential law") {
    const PHDist d = ph_validate(Vector{{1.0}}, Matrix{{-2.0}});
    for (double x : {0.0, 0.3, 1.0, 4.0}) {
      CHECK(ph_density(d, x) == doctest::Approx(2.0 * std::exp(-2.0 * x)).epsilon(1e-13));
      CHECK(ph_cdf(d, x) == doctest::Approx(-std::expm1(-2.0 * x)).epsilon(1e-13));
    }
    CHECK(ph_laplace(d, 1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(d.atom() == 0.0);
    CHECK_THROWS_AS(ph_density(d, -1.0), DomainError);
  }

  TEST_CASE("Erlang-2 density") {
    const PHDist d = ph_validate(Vector{{1.0, 0.0}}, Matrix{{-3.0, 3.0}, {0.0, -3.0}});
    for (double x : {0.1, 0.5, 2.0}) {
      CHECK(ph_density(d, x) == doctest::Approx(9.0 * x * std::exp(-3.0 * x)).epsilon(1e-12));
    }
  }

  TEST_CASE("defective initial vector puts an atom at zero") {
    const PHDist d = ph_validate(Vector{{0.5, 0.2}}, Matrix{{-1.0, 0.5}, {0.0, -2.0}});
    CHECK(d.atom() == doctest::Approx(0.3));
    CHECK(ph_cdf(d, 0.0) == doctest::Approx(0.3));
    CHECK(ph_laplace(d, 0.0) == doctest::Approx(1.0));
    CHECK(ph_laplace(d, 1e9) == doctest::Approx(0.3).epsilon(1e-6));
    random::RngStream rng(3);
    int empty = 0;
    const int n = 50000;
    for (int i = 0; i < n; ++i) empty += ph_sample_path(rng, d).empty() ? 1 : 0;
    CHECK(std::abs(empty / double(n) - 0.3) <= 4 * std::sqrt(0.3 * 0.7 / n));
  }

  TEST_CASE("path sampler mean matches pi (-T)^{-1} e") {
    random::RngStream gen(1);
    const auto m = testutil::random_ph(gen, 4);
    const PHDist d = ph_validate(m.pi, m.T);
    const double mean = d.pi().dot(numerics::solve_linear(Matrix(-d.T()), Vector(Vector::Ones(4))));
    random::RngStream rng(2);
    stats::MeanAccumulator acc;
    for (int i = 0; i < 100000; ++i) {
      const PathRecord path = ph_sample_path(rng, d);
      double sum = 0.0;
      for (double s : path.sojourns) sum += s;
      REQUIRE(sum == doctest::Approx(path.total));
      REQUIRE(path.states.size() == path.sojourns.size());
      acc.add(path.total);
    }
    CHECK(std::abs(acc.mean() - mean) <= 4 * acc.standard_error());
  }

  TEST_CASE("embedded chain rows are probability vectors") {
    random::RngStream gen(8);
    const auto m = testutil::random_ph(gen, 5);
    const PHDist d = ph_validate(m.pi, m.T);
    for (Eigen::Index i = 0; i < 5; ++i) {
      CHECK(d.embedded().row(i).sum() == doctest::Approx(1.0).epsilon(1e-13));
      CHECK(d.embedded()(i, i) == 0.0);
    }
  }
}
