#pragma once

// Multivariate reward laws driven by a transient jump process.
//
//   MPH*(pi, T, R):        rewards accumulated along a Markov jump process;
//                          E exp(-<Y,theta>) = pi (Delta(R theta) - T)^{-1} t.
//   MPH*_alpha(pi, T, R):  the same rewards along the semi-Markov process
//                          with ML(alpha, lambda_i) sojourns;
//                          E exp(-<Y,theta>) = pi (Delta(R theta)^alpha - T)^{-1} t,
//                          the power alpha taken after the inner products.
//
// Column k of the p x n reward matrix R holds the per-state reward rates of
// component Y_k.

#include <functional>
#include <memory>
#include <optional>
#include <span>

#include "fracmph/frac_phase.hpp"
#include "fracmph/phase_type.hpp"
#include "fracmph/random.hpp"

namespace fracmph {

/// Lebesgue density of the absolutely continuous part of a joint law.
using JointDensity = std::function<double(std::span<const double>)>;

/// Throws ValidationError unless R has p rows, nonnegative finite entries
/// and no all-zero column.
void validate_rewards(const Matrix& r, Eigen::Index p);

class MPHStarDist {
 public:
  MPHStarDist(PHDist base, Matrix rewards);

  const PHDist& base() const noexcept { return base_; }
  const Matrix& rewards() const noexcept { return rewards_; }
  Eigen::Index components() const noexcept { return rewards_.cols(); }

 private:
  PHDist base_;
  Matrix rewards_;
};

class MPHAlphaDist {
 public:
  MPHAlphaDist(PHDist base, Matrix rewards, double alpha);

  const PHDist& base() const noexcept { return base_; }
  const Matrix& rewards() const noexcept { return rewards_; }
  double alpha() const noexcept { return alpha_; }
  Eigen::Index components() const noexcept { return rewards_.cols(); }

  /// The underlying MPH* law (same pi, T, R; exponential sojourns).
  MPHStarDist star() const { return MPHStarDist(base_, rewards_); }

  /// Closed-form joint density, when a structured constructor supplied one.
  const JointDensity* closed_form() const noexcept { return closed_form_.get(); }
  MPHAlphaDist with_closed_form(JointDensity density) const;

 private:
  PHDist base_;
  Matrix rewards_;
  double alpha_;
  std::shared_ptr<const JointDensity> closed_form_;
};

MPHStarDist mph_validate(const Vector& pi, const Matrix& t, const Matrix& r);
MPHAlphaDist mpha_validate(const Vector& pi, const Matrix& t, const Matrix& r, double alpha);

/// pi (Delta(R theta) - T)^{-1} t + (1 - pi e), theta >= 0.
double mph_laplace(const MPHStarDist& d, const Vector& theta);
/// pi (Delta(R theta)^alpha - T)^{-1} t + (1 - pi e), theta >= 0.
double mpha_laplace(const MPHAlphaDist& d, const Vector& theta);

/// Rewards along one Markov jump path. When `trace` is given it receives
/// the path.
Vector mph_sample(random::RngStream& rng, const MPHStarDist& d, PathRecord* trace = nullptr);
/// Rewards along one semi-Markov path with ML sojourns.
Vector mpha_sample_path(random::RngStream& rng, const MPHAlphaDist& d, PathRecord* trace = nullptr);

/// Product representation: Y = R^T (W^{1/alpha} . S), with W ~ MPH*(pi, T, I)
/// the vector of occupation times of the p states and S a vector of p
/// independent positive stable variables (Laplace transform exp(-u^alpha)).
/// `trace` receives the Markov path that generated W.
Vector mpha_sample_product(random::RngStream& rng, const MPHAlphaDist& d,
                           PathRecord* trace = nullptr);

/// Law of <Y, w>: an atom at zero plus a PH_alpha(pi_w, T_w) part.
struct ProjectionResult {
  double atom = 0.0;
  FracPHDist dist;
  /// Original state indices kept in the reduced model (the states with
  /// (Rw)_i > 0), in order.
  std::vector<Eigen::Index> kept_states;
};

/// Projection onto a nonnegative, nonzero direction w. States with
/// (Rw)_i = 0 are censored out through a Schur complement:
///   pi_w = pi_+ + pi_0 (-T_00)^{-1} T_0+
///   T_w  = Delta((Rw)_+^alpha)^{-1} (T_++ + T_+0 (-T_00)^{-1} T_0+)
/// Throws DomainError when no state earns reward along w.
ProjectionResult project(const MPHAlphaDist& d, const Vector& w);

/// Law of the k-th component (0-based).
ProjectionResult marginal(const MPHAlphaDist& d, Eigen::Index k);

/// Exponents of the componentwise power transform Y_i = X_i^{1/nu_i}.
class PowerVector {
 public:
  explicit PowerVector(Vector nu);
  const Vector& nu() const noexcept { return nu_; }
  Eigen::Index size() const noexcept { return nu_.size(); }

 private:
  Vector nu_;
};

/// Density of Y = X^{1/nu}: (prod_i nu_i y_i^{nu_i - 1}) f_X(y_1^{nu_1}, ..., y_n^{nu_n}).
/// Uses the closed form attached to d, or for n = 1 the projected PH_alpha
/// density. Throws NoClosedFormError otherwise.
JointDensity power_density(const MPHAlphaDist& d, const PowerVector& nu);

/// Componentwise x_i -> x_i^{1/nu_i}.
Vector apply_power(const Vector& x, const PowerVector& nu);

}  // namespace fracmph
