#pragma once

// Fractional phase-type laws PH_alpha(pi, T) ("matrix Mittag-Leffler"):
// Laplace transform pi (u^alpha I - T)^{-1} t, density
// x^{alpha-1} pi E_{alpha,alpha}(T x^alpha) t and distribution function
// 1 - pi E_{alpha,1}(T x^alpha) e. alpha = 1 is the classical PH case.

#include <memory>

#include "fracmph/numerics.hpp"
#include "fracmph/phase_type.hpp"

namespace fracmph {

class FracPHDist {
 public:
  FracPHDist(PHDist base, double alpha, numerics::MLOptions opts = {});

  const PHDist& base() const noexcept { return base_; }
  double alpha() const noexcept { return alpha_; }
  /// Cached spectral data of T, shared between copies.
  const numerics::MatrixMLKernel& kernel() const noexcept { return *kernel_; }

 private:
  PHDist base_;
  double alpha_;
  std::shared_ptr<const numerics::MatrixMLKernel> kernel_;
};

/// Validates (pi, T) and alpha in (0, 1].
FracPHDist fph_validate(const Vector& pi, const Matrix& t, double alpha);

/// Density of the absolutely continuous part. Diverges as x -> 0 when
/// alpha < 1; x = 0 returns the limit (+inf, or pi t when alpha = 1).
double fph_density(const FracPHDist& d, double x);
double fph_cdf(const FracPHDist& d, double x);
double fph_laplace(const FracPHDist& d, double u);

/// P(t) = E_{alpha,1}(T t^alpha): transition probabilities among the
/// transient states of the semi-Markov process. Throws AccuracyError if a
/// row sum leaves [0, 1] by more than 1e-6.
Matrix fph_transition_matrix(const FracPHDist& d, double t);

/// Semi-Markov path with ML(alpha, lambda_i) sojourns.
PathRecord fph_sample_path(random::RngStream& rng, const FracPHDist& d);

/// W^{1/alpha} S with W ~ PH(pi, T) and S positive stable.
double fph_sample_product(random::RngStream& rng, const FracPHDist& d);

}  // namespace fracmph
