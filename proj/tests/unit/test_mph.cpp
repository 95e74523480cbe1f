#include <cmath>
#include <optional>
#include <vector>

#include <doctest.h>

#include "fracmph/constructors.hpp"
#include "fracmph/errors.hpp"
#include "fracmph/mph.hpp"
#include "fracmph/stats.hpp"
#include "fracmph/verify.hpp"
#include "unit/helpers.hpp"

using namespace fracmph;

namespace {

MPHAlphaDist random_mpha(random::RngStream& gen, int p, int n, double alpha) {
  const auto m = testutil::random_ph(gen, p, 0.9);
  Matrix r(p, n);
  for (int i = 0; i < p; ++i) {
    for (int k = 0; k < n; ++k) {
      // roughly a third of the rewards are exactly zero
      const double u = random::sample_uniform(gen);
      r(i, k) = u < 0.33 ? 0.0 : 3.0 * u;
    }
  }
  for (int k = 0; k < n; ++k) r(k % p, k) = std::max(r(k % p, k), 0.5);
  return mpha_validate(m.pi, m.T, r, alpha);
}

// (pi, T) of the hand example: state 2 earns nothing and is only entered
// from state 1.
MPHAlphaDist hand_example(double alpha) {
  return mpha_validate(Vector{{1.0, 0.0}}, Matrix{{-1.0, 1.0}, {0.0, -2.0}}, Matrix{{1.0}, {0.0}}, alpha);
}

}  // namespace

TEST_SUITE("mph") {
  TEST_CASE("reward validation") {
    const PHDist base = ph_validate(Vector{{1.0, 0.0}}, Matrix{{-1.0, 1.0}, {0.0, -1.0}});
    CHECK_THROWS_AS(MPHStarDist(base, Matrix{{1.0, 0.0}, {1.0, 0.0}}), ValidationError);
    CHECK_THROWS_AS(MPHStarDist(base, Matrix{{1.0}, {-1.0}}), ValidationError);
    CHECK_THROWS_AS(MPHStarDist(base, Matrix{{1.0}, {1.0}, {1.0}}), ValidationError);
    CHECK_NOTHROW(MPHStarDist(base, Matrix{{1.0}, {0.0}}));
    CHECK_THROWS_AS(MPHAlphaDist(base, Matrix{{1.0}, {1.0}}, 0.0), ValidationError);
  }

  TEST_CASE("scalar transforms") {
    const double lambda = 2.0, r = 1.5, theta = 0.7;
    const auto star = mph_validate(Vector{{1.0}}, Matrix{{-lambda}}, Matrix{{r}});
    CHECK(mph_laplace(star, Vector{{theta}}) == doctest::Approx(lambda / (r * theta + lambda)).epsilon(1e-14));
    for (double alpha : {0.4, 0.8}) {
      const auto d = mpha_validate(Vector{{1.0}}, Matrix{{-lambda}}, Matrix{{r}}, alpha);
      CHECK(mpha_laplace(d, Vector{{theta}}) ==
            doctest::Approx(lambda / (std::pow(r * theta, alpha) + lambda)).epsilon(1e-14));
    }
    CHECK(mph_laplace(star, Vector{{0.0}}) == doctest::Approx(1.0));
    CHECK_THROWS_AS(mph_laplace(star, Vector{{-1.0}}), DomainError);
  }

  TEST_CASE("all-ones reward reduces to the absorption time") {
    random::RngStream gen(12);
    const auto m = testutil::random_ph(gen, 4, 0.85);
    const auto star = mph_validate(m.pi, m.T, Matrix::Ones(4, 1));
    const PHDist ph = ph_validate(m.pi, m.T);
    for (double u : {0.0, 0.3, 2.0}) CHECK(mph_laplace(star, Vector{{u}}) == doctest::Approx(ph_laplace(ph, u)));
  }

  TEST_CASE("alpha = 1 coincides with MPH*") {
    random::RngStream gen(13);
    const auto d = random_mpha(gen, 4, 3, 1.0);
    for (int i = 0; i < 20; ++i) {
      Vector theta(3);
      for (int k = 0; k < 3; ++k) theta(k) = random::sample_exponential(gen, 0.7);
      CHECK(std::abs(mpha_laplace(d, theta) - mph_laplace(d.star(), theta)) <= 1e-12);
    }
  }

  TEST_CASE("transform along a ray equals the projected law") {
    random::RngStream gen(14);
    for (int model = 0; model < 5; ++model) {
      const auto d = random_mpha(gen, 4, 3, 0.7);
      Vector w(3);
      for (int k = 0; k < 3; ++k) w(k) = random::sample_uniform(gen) < 0.3 ? 0.0 : random::sample_uniform(gen);
      if (w.maxCoeff() == 0.0) w(0) = 1.0;
      std::optional<ProjectionResult> proj;
      try {
        proj.emplace(project(d, w));
      } catch (const DomainError&) {
        continue;  // E+ empty for this direction
      }
      CHECK(proj->atom == doctest::Approx(1.0 - proj->dist.base().pi().sum()).epsilon(1e-12));
      for (double u : {0.1, 0.8, 3.0}) {
        const Vector theta = u * w;
        CHECK(std::abs(mpha_laplace(d, theta) - fph_laplace(proj->dist, u)) <= 1e-8);
      }
    }
  }

  TEST_CASE("single-coordinate transform equals the marginal") {
    random::RngStream gen(15);
    const auto d = random_mpha(gen, 4, 2, 0.6);
    for (Eigen::Index k = 0; k < 2; ++k) {
      const auto marg = marginal(d, k);
      for (double u : {0.2, 1.0, 4.0}) {
        Vector theta = Vector::Zero(2);
        theta(k) = u;
        CHECK(std::abs(mpha_laplace(d, theta) - fph_laplace(marg.dist, u)) <= 1e-10);
      }
    }
    CHECK_THROWS_AS(marginal(d, 2), DomainError);
  }

  TEST_CASE("projection special cases") {
    random::RngStream gen(16);
    const auto m = testutil::random_ph(gen, 3, 0.8);
    // R = I, w = e: nothing to censor
    const auto ident = mpha_validate(m.pi, m.T, Matrix::Identity(3, 3), 0.8);
    const auto p1 = project(ident, Vector::Ones(3));
    CHECK((p1.dist.base().pi() - m.pi).cwiseAbs().maxCoeff() == 0.0);
    CHECK((p1.dist.base().T() - m.T).cwiseAbs().maxCoeff() == 0.0);
    CHECK(p1.atom == doctest::Approx(0.2));

    // strictly positive rewards divide row i of T by r_i^alpha
    const Vector r{{0.5, 2.0, 3.0}};
    const auto scaled = mpha_validate(m.pi, m.T, r, 0.8);
    const auto p2 = project(scaled, Vector{{1.0}});
    for (Eigen::Index i = 0; i < 3; ++i) {
      const RowVector want = m.T.row(i) / std::pow(r(i), 0.8);
      CHECK((p2.dist.base().T().row(i) - want).cwiseAbs().maxCoeff() <= 1e-14);
    }

    // hand example: E+ = {1}, E0 = {2}, T_0+ = 0
    const auto p3 = project(hand_example(0.7), Vector{{1.0}});
    CHECK(p3.dist.base().dim() == 1);
    CHECK(p3.dist.base().T()(0, 0) == doctest::Approx(-1.0));
    CHECK(p3.dist.base().pi()(0) == doctest::Approx(1.0));
    CHECK(p3.atom == doctest::Approx(0.0));
    CHECK(p3.kept_states == std::vector<Eigen::Index>{0});
  }

  TEST_CASE("projection onto a direction without rewards is an error") {
    const auto d = mpha_validate(Vector{{1.0, 0.0}}, Matrix{{-1.0, 1.0}, {0.0, -2.0}},
                                 Matrix{{1.0, 0.0}, {0.0, 1.0}}, 0.9);
    CHECK_THROWS_AS(project(d, Vector{{0.0, 0.0}}), DomainError);
    CHECK_THROWS_AS(project(d, Vector{{-1.0, 1.0}}), DomainError);
    CHECK_NOTHROW(project(d, Vector{{0.0, 1.0}}));
  }

  TEST_CASE("path sampler accumulates rewards along the trace") {
    random::RngStream gen(17);
    const auto d = random_mpha(gen, 3, 2, 0.8);
    random::RngStream rng(4);
    for (int i = 0; i < 200; ++i) {
      PathRecord trace;
      const Vector y = mpha_sample_path(rng, d, &trace);
      Vector want = Vector::Zero(2);
      for (std::size_t j = 0; j < trace.states.size(); ++j) {
        want += trace.sojourns[j] * d.rewards().row(static_cast<Eigen::Index>(trace.states[j])).transpose();
      }
      CHECK((y - want).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, want.maxCoeff()));
    }
  }

  TEST_CASE("identical reward columns give identical components") {
    random::RngStream gen(18);
    const auto m = testutil::random_ph(gen, 3);
    Matrix r(3, 2);
    r << 1.0, 1.0, 0.5, 0.5, 2.0, 2.0;
    const auto d = mpha_validate(m.pi, m.T, r, 0.7);
    random::RngStream rng(5);
    for (int i = 0; i < 100; ++i) {
      const Vector y = mpha_sample_path(rng, d);
      CHECK(y(0) == y(1));
    }
  }

  TEST_CASE("product sampler at alpha = 1 is R^T W on the same path") {
    random::RngStream gen(19);
    const auto d = random_mpha(gen, 4, 2, 1.0);
    random::RngStream a(6), b(6);
    for (int i = 0; i < 200; ++i) {
      const Vector y = mpha_sample_product(a, d);
      const Vector z = mph_sample(b, d.star());
      CHECK((y - z).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, z.maxCoeff()));
    }
  }

  TEST_CASE("both samplers share the embedded chain") {
    const BivariateModel fig3 = preset(kPaperFig3Name);
    const auto& d = fig3.dist();
    const int n = 20000;
    std::vector<double> first_path(6, 0.0), first_product(6, 0.0);
    random::RngStream a(31, 0), b(31, 1);
    for (int i = 0; i < n; ++i) {
      PathRecord tp, tq;
      mpha_sample_path(a, d, &tp);
      mpha_sample_product(b, d, &tq);
      if (!tp.empty()) first_path[tp.states.front()] += 1.0 / n;
      if (!tq.empty()) first_product[tq.states.front()] += 1.0 / n;
    }
    for (int s = 0; s < 6; ++s) {
      const double p = d.base().pi()(s);
      const double se = std::sqrt(std::max(p * (1 - p), 1e-12) / n);
      CHECK(std::abs(first_path[s] - p) <= 4 * se);
      CHECK(std::abs(first_product[s] - p) <= 4 * se);
    }
  }

  TEST_CASE("stables attached to components instead of states break the transform") {
    random::RngStream gen(21);
    const auto d = random_mpha(gen, 3, 2, 0.5);
    const auto star = d.star();
    const std::vector<Vector> thetas{Vector{{1.0, 1.0}}, Vector{{0.3, 2.0}}, Vector{{2.0, 0.5}}};
    const auto analytic = [&](const Vector& th) { return mpha_laplace(d, th); };
    // (R^T W)^{1/alpha} . S with one stable per component
    const verify::Sampler literal = [&](random::RngStream& rng) {
      Vector y = mph_sample(rng, star);
      for (Eigen::Index k = 0; k < y.size(); ++k) {
        y(k) = std::pow(y(k), 1.0 / d.alpha()) * random::sample_positive_stable(rng, d.alpha());
      }
      return y;
    };
    const auto bad = verify::check_laplace(literal, 2, analytic, thetas, 100000, 9, 1, "literal");
    CHECK_FALSE(bad.pass);
    const auto good = verify::check_laplace(verify::make_sampler(d, verify::SamplerKind::Product), 2, analytic,
                                            thetas, 100000, 9, 1, "product");
    CHECK(good.pass);
  }

  TEST_CASE("mph sampler matches its transform") {
    random::RngStream gen(20);
    const auto d = random_mpha(gen, 3, 2, 1.0);
    const auto star = d.star();
    auto report = verify::check_laplace(
        [&](random::RngStream& rng) { return mph_sample(rng, star); }, 2,
        [&](const Vector& th) { return mph_laplace(star, th); }, {Vector{{1.0, 1.0}}, Vector{{0.3, 2.0}}}, 200000, 8,
        1, "mph");
    CHECK(report.pass);
  }

  TEST_CASE("power transform densities") {
    const double lambda = 1.3, alpha = 0.7;
    const auto d = mpha_validate(Vector{{1.0}}, Matrix{{-lambda}}, Matrix{{1.0}}, alpha);
    const FracPHDist scalar = fph_validate(Vector{{1.0}}, Matrix{{-lambda}}, alpha);
    const auto same = power_density(d, PowerVector(Vector{{1.0}}));
    const auto sq = power_density(d, PowerVector(Vector{{2.0}}));
    for (double y : {0.2, 1.0, 2.5}) {
      CHECK(same(std::span<const double>(&y, 1)) == doctest::Approx(fph_density(scalar, y)).epsilon(1e-12));
      CHECK(sq(std::span<const double>(&y, 1)) ==
            doctest::Approx(2.0 * y * fph_density(scalar, y * y)).epsilon(1e-12));
    }
    CHECK(apply_power(Vector{{4.0, 27.0}}, PowerVector(Vector{{2.0, 3.0}})).isApprox(Vector{{2.0, 3.0}}));
    CHECK_THROWS_AS(PowerVector(Vector{{0.0}}), ValidationError);

    random::RngStream gen(22);
    const auto multi = random_mpha(gen, 3, 2, 0.8);
    CHECK_THROWS_AS(power_density(multi, PowerVector(Vector::Ones(2))), NoClosedFormError);
  }
}
