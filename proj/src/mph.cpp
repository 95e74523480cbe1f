#include <cmath>
#include <sstream>

#include "fracmph/errors.hpp"
#include "fracmph/mph.hpp"

namespace fracmph {

void validate_rewards(const Matrix& r, Eigen::Index p) {
  std::vector<std::string> errors;
  auto fail = [&](auto&&... parts) {
    std::ostringstream msg;
    (msg << ... << parts);
    errors.push_back(msg.str());
  };
  if (r.rows() != p) fail("R has ", r.rows(), " rows but T has ", p, " states");
  if (r.cols() == 0) fail("R must have at least one column");
  if (!errors.empty()) throw ValidationError(errors);
  if (!r.allFinite()) throw ValidationError("R entries must be finite");
  for (Eigen::Index i = 0; i < r.rows(); ++i) {
    for (Eigen::Index k = 0; k < r.cols(); ++k) {
      if (r(i, k) < 0.0) fail("R[", i, "][", k, "] = ", r(i, k), " is negative");
    }
  }
  for (Eigen::Index k = 0; k < r.cols(); ++k) {
    if (r.col(k).maxCoeff() <= 0.0) fail("column ", k, " of R is all zero");
  }
  if (!errors.empty()) throw ValidationError(errors);
}

MPHStarDist::MPHStarDist(PHDist base, Matrix rewards)
    : base_(std::move(base)), rewards_(std::move(rewards)) {
  validate_rewards(rewards_, base_.dim());
}

MPHAlphaDist::MPHAlphaDist(PHDist base, Matrix rewards, double alpha)
    : base_(std::move(base)), rewards_(std::move(rewards)), alpha_(alpha) {
  validate_rewards(rewards_, base_.dim());
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    std::ostringstream msg;
    msg << "alpha must lie in (0,1], got " << alpha;
    throw ValidationError(msg.str());
  }
}

MPHAlphaDist MPHAlphaDist::with_closed_form(JointDensity density) const {
  MPHAlphaDist copy = *this;
  copy.closed_form_ = std::make_shared<const JointDensity>(std::move(density));
  return copy;
}

MPHStarDist mph_validate(const Vector& pi, const Matrix& t, const Matrix& r) {
  return MPHStarDist(ph_validate(pi, t), r);
}

MPHAlphaDist mpha_validate(const Vector& pi, const Matrix& t, const Matrix& r, double alpha) {
  return MPHAlphaDist(ph_validate(pi, t), r, alpha);
}

namespace {

void check_theta(const Vector& theta, Eigen::Index n, const char* who) {
  if (theta.size() != n) {
    std::ostringstream msg;
    msg << who << ": theta has " << theta.size() << " entries, expected " << n;
    throw DomainError(msg.str());
  }
  if (!theta.allFinite() || theta.minCoeff() < 0.0) {
    throw DomainError(std::string(who) + ": theta must be finite and nonnegative");
  }
}

double reward_laplace(const PHDist& base, const Vector& diag) {
  Matrix m = -base.T();
  m.diagonal() += diag;
  return base.atom() + base.pi().dot(numerics::solve_linear(m, base.exit()));
}

template <typename Sojourn>
Vector accumulate_rewards(random::RngStream& rng, const PHDist& base, const Matrix& rewards,
                          Sojourn&& sojourn, PathRecord* trace) {
  Vector y = Vector::Zero(rewards.cols());
  const double total = detail::walk_path(rng, base, sojourn, [&](std::size_t state, double length) {
    y += length * rewards.row(static_cast<Eigen::Index>(state)).transpose();
    if (trace) {
      trace->states.push_back(state);
      trace->sojourns.push_back(length);
    }
  });
  if (trace) trace->total = total;
  return y;
}

}  // namespace

double mph_laplace(const MPHStarDist& d, const Vector& theta) {
  check_theta(theta, d.components(), "mph_laplace");
  return reward_laplace(d.base(), d.rewards() * theta);
}

double mpha_laplace(const MPHAlphaDist& d, const Vector& theta) {
  check_theta(theta, d.components(), "mpha_laplace");
  Vector diag = d.rewards() * theta;
  // 0^alpha = 0 on boundary rows
  for (Eigen::Index i = 0; i < diag.size(); ++i) {
    diag(i) = diag(i) > 0.0 ? std::pow(diag(i), d.alpha()) : 0.0;
  }
  return reward_laplace(d.base(), diag);
}

Vector mph_sample(random::RngStream& rng, const MPHStarDist& d, PathRecord* trace) {
  const auto& base = d.base();
  return accumulate_rewards(
      rng, base, d.rewards(),
      [&](std::size_t state) { return random::sample_exponential(rng, base.rates()(state)); }, trace);
}

Vector mpha_sample_path(random::RngStream& rng, const MPHAlphaDist& d, PathRecord* trace) {
  const auto& base = d.base();
  return accumulate_rewards(
      rng, base, d.rewards(),
      [&](std::size_t state) { return random::sample_ml(rng, d.alpha(), base.rates()(state)); },
      trace);
}

Vector mpha_sample_product(random::RngStream& rng, const MPHAlphaDist& d, PathRecord* trace) {
  const auto& base = d.base();
  const Eigen::Index p = base.dim();
  Vector occupation = Vector::Zero(p);
  const double total = detail::walk_path(
      rng, base, [&](std::size_t state) { return random::sample_exponential(rng, base.rates()(state)); },
      [&](std::size_t state, double length) {
        occupation(static_cast<Eigen::Index>(state)) += length;
        if (trace) {
          trace->states.push_back(state);
          trace->sojourns.push_back(length);
        }
      });
  if (trace) trace->total = total;

  // One stable per state, drawn for every state so the number of variates
  // consumed per sample does not depend on the path.
  Vector scaled(p);
  for (Eigen::Index i = 0; i < p; ++i) {
    const double s = random::sample_positive_stable(rng, d.alpha());
    scaled(i) = occupation(i) > 0.0 ? std::pow(occupation(i), 1.0 / d.alpha()) * s : 0.0;
  }
  return d.rewards().transpose() * scaled;
}

ProjectionResult project(const MPHAlphaDist& d, const Vector& w) {
  const Eigen::Index n = d.components();
  if (w.size() != n) {
    std::ostringstream msg;
    msg << "project: w has " << w.size() << " entries, expected " << n;
    throw DomainError(msg.str());
  }
  if (!w.allFinite() || w.minCoeff() < 0.0) throw DomainError("project: w must be nonnegative");
  if (w.maxCoeff() <= 0.0) throw DomainError("project: w must be nonzero");

  const auto& base = d.base();
  const Eigen::Index p = base.dim();
  const Vector rw = d.rewards() * w;
  std::vector<Eigen::Index> plus;
  std::vector<Eigen::Index> zero;
  for (Eigen::Index i = 0; i < p; ++i) (rw(i) > 0.0 ? plus : zero).push_back(i);
  if (plus.empty()) {
    throw DomainError("project: no state earns reward along w, the projection is identically 0");
  }

  const auto np = static_cast<Eigen::Index>(plus.size());
  const auto nz = static_cast<Eigen::Index>(zero.size());
  const Matrix& t = base.T();
  Matrix tpp(np, np), tpz(np, nz), tzp(nz, np), tzz(nz, nz);
  Vector pi_plus(np), pi_zero(nz);
  for (Eigen::Index a = 0; a < np; ++a) {
    pi_plus(a) = base.pi()(plus[a]);
    for (Eigen::Index b = 0; b < np; ++b) tpp(a, b) = t(plus[a], plus[b]);
    for (Eigen::Index b = 0; b < nz; ++b) tpz(a, b) = t(plus[a], zero[b]);
  }
  for (Eigen::Index a = 0; a < nz; ++a) {
    pi_zero(a) = base.pi()(zero[a]);
    for (Eigen::Index b = 0; b < np; ++b) tzp(a, b) = t(zero[a], plus[b]);
    for (Eigen::Index b = 0; b < nz; ++b) tzz(a, b) = t(zero[a], zero[b]);
  }

  Vector pi_w = pi_plus;
  Matrix censored = tpp;
  if (nz > 0) {
    // (-T_00)^{-1} T_0+ : where a path entering E_0 re-enters E_+
    Matrix reentry;
    try {
      reentry = numerics::solve_linear(Matrix(-tzz), tzp);
    } catch (const SingularMatrixError&) {
      throw SingularMatrixError("project: T_00 is numerically singular");
    }
    pi_w += reentry.transpose() * pi_zero;
    censored += tpz * reentry;
  }
  Matrix t_w(np, np);
  for (Eigen::Index a = 0; a < np; ++a) {
    t_w.row(a) = censored.row(a) / std::pow(rw(plus[a]), d.alpha());
  }

  // Clear rounding noise of size ~1e-16 so the reduced model validates.
  for (Eigen::Index a = 0; a < np; ++a) {
    if (pi_w(a) < 0.0 && pi_w(a) > -1e-12) pi_w(a) = 0.0;
    for (Eigen::Index b = 0; b < np; ++b) {
      if (a != b && t_w(a, b) < 0.0 && t_w(a, b) > -1e-12 * std::abs(t_w(a, a))) t_w(a, b) = 0.0;
    }
  }
  if (pi_w.sum() > 1.0 && pi_w.sum() < 1.0 + 1e-12) pi_w /= pi_w.sum();

  FracPHDist dist(ph_validate(pi_w, t_w), d.alpha());
  const double atom = dist.base().atom();
  return {atom, std::move(dist), std::move(plus)};
}

ProjectionResult marginal(const MPHAlphaDist& d, Eigen::Index k) {
  if (k < 0 || k >= d.components()) {
    std::ostringstream msg;
    msg << "marginal: component " << k << " out of range [0, " << d.components() << ")";
    throw DomainError(msg.str());
  }
  return project(d, Vector::Unit(d.components(), k));
}

PowerVector::PowerVector(Vector nu) : nu_(std::move(nu)) {
  if (nu_.size() == 0) throw ValidationError("nu must not be empty");
  for (Eigen::Index i = 0; i < nu_.size(); ++i) {
    if (!(nu_(i) > 0.0) || !std::isfinite(nu_(i))) {
      std::ostringstream msg;
      msg << "nu[" << i << "] = " << nu_(i) << " must be positive";
      throw ValidationError(msg.str());
    }
  }
}

Vector apply_power(const Vector& x, const PowerVector& nu) {
  if (x.size() != nu.size()) throw DomainError("apply_power: dimension mismatch");
  Vector y(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) y(i) = std::pow(x(i), 1.0 / nu.nu()(i));
  return y;
}

JointDensity power_density(const MPHAlphaDist& d, const PowerVector& nu) {
  const Eigen::Index n = d.components();
  if (nu.size() != n) throw DomainError("power_density: nu has the wrong dimension");

  JointDensity base;
  if (d.closed_form()) {
    base = *d.closed_form();
  } else if (n == 1) {
    auto law = std::make_shared<const FracPHDist>(project(d, Vector::Ones(1)).dist);
    base = [law](std::span<const double> x) { return fph_density(*law, x[0]); };
  } else {
    throw NoClosedFormError("power_density: no closed-form joint density for this model");
  }

  const Vector exponents = nu.nu();
  return [base = std::move(base), exponents](std::span<const double> y) {
    if (static_cast<Eigen::Index>(y.size()) != exponents.size()) {
      throw DomainError("power density: wrong number of coordinates");
    }
    std::vector<double> x(y.size());
    double jacobian = 1.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (y[i] < 0.0) throw DomainError("power density: coordinates must be nonnegative");
      const double v = exponents(static_cast<Eigen::Index>(i));
      x[i] = std::pow(y[i], v);
      jacobian *= v * std::pow(y[i], v - 1.0);
    }
    if (jacobian == 0.0) return 0.0;
    return jacobian * base(x);
  };
}

}  // namespace fracmph
