#include <cmath>
#include <limits>
#include <sstream>

#include "fracmph/errors.hpp"
#include "fracmph/frac_phase.hpp"

namespace fracmph {

FracPHDist::FracPHDist(PHDist base, double alpha, numerics::MLOptions opts)
    : base_(std::move(base)), alpha_(alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    std::ostringstream msg;
    msg << "alpha must lie in (0,1], got " << alpha;
    throw ValidationError(msg.str());
  }
  kernel_ = std::make_shared<const numerics::MatrixMLKernel>(base_.T(), opts);
}

FracPHDist fph_validate(const Vector& pi, const Matrix& t, double alpha) {
  return FracPHDist(ph_validate(pi, t), alpha);
}

double fph_density(const FracPHDist& d, double x) {
  if (!(x >= 0.0)) throw DomainError("fph_density: x must be nonnegative");
  const double a = d.alpha();
  const auto& base = d.base();
  if (x == 0.0) {
    const double at_zero = base.pi().dot(base.exit()) * numerics::rgamma(a);
    if (a < 1.0 && at_zero > 0.0) return std::numeric_limits<double>::infinity();
    return a < 1.0 ? 0.0 : at_zero;
  }
  const double xa = std::pow(x, a);
  return std::pow(x, a - 1.0) * d.kernel().bilinear(base.pi(), {a, a}, xa, base.exit());
}

double fph_cdf(const FracPHDist& d, double x) {
  if (!(x >= 0.0)) throw DomainError("fph_cdf: x must be nonnegative");
  const auto& base = d.base();
  if (x == 0.0) return base.atom();
  const double xa = std::pow(x, d.alpha());
  return 1.0 - d.kernel().bilinear(base.pi(), {d.alpha(), 1.0}, xa, Vector::Ones(base.dim()));
}

double fph_laplace(const FracPHDist& d, double u) {
  if (!(u >= 0.0)) throw DomainError("fph_laplace: u must be nonnegative");
  const auto& base = d.base();
  const Eigen::Index p = base.dim();
  const double ua = u == 0.0 ? 0.0 : std::pow(u, d.alpha());
  const Matrix resolvent = ua * Matrix::Identity(p, p) - base.T();
  return base.atom() + base.pi().dot(numerics::solve_linear(resolvent, base.exit()));
}

Matrix fph_transition_matrix(const FracPHDist& d, double t) {
  if (!(t >= 0.0)) throw DomainError("fph_transition_matrix: t must be nonnegative");
  const Eigen::Index p = d.base().dim();
  if (t == 0.0) return Matrix::Identity(p, p);
  Matrix probs = d.kernel().evaluate({d.alpha(), 1.0}, std::pow(t, d.alpha()));
  const Vector rows = probs.rowwise().sum();
  if (rows.minCoeff() < -1e-6 || rows.maxCoeff() > 1.0 + 1e-6) {
    std::ostringstream msg;
    msg << "fph_transition_matrix: row sums outside [0,1] at t = " << t << " (min "
        << rows.minCoeff() << ", max " << rows.maxCoeff() << ")";
    throw AccuracyError(msg.str());
  }
  return probs;
}

PathRecord fph_sample_path(random::RngStream& rng, const FracPHDist& d) {
  PathRecord path;
  const auto& base = d.base();
  path.total = detail::walk_path(
      rng, base,
      [&](std::size_t state) { return random::sample_ml(rng, d.alpha(), base.rates()(state)); },
      [&](std::size_t state, double length) {
        path.states.push_back(state);
        path.sojourns.push_back(length);
      });
  return path;
}

double fph_sample_product(random::RngStream& rng, const FracPHDist& d) {
  const auto& base = d.base();
  const double w = detail::walk_path(
      rng, base, [&](std::size_t state) { return random::sample_exponential(rng, base.rates()(state)); },
      [](std::size_t, double) {});
  if (d.alpha() == 1.0 || w == 0.0) return w;
  return std::pow(w, 1.0 / d.alpha()) * random::sample_positive_stable(rng, d.alpha());
}

}  // namespace fracmph
