#pragma once

// Scalar special functions and matrix kernels: Gamma, Mittag-Leffler
// (scalar, complex and matrix argument), matrix exponential, dense linear
// solves and a product-integration Caputo derivative.
//
// Everything here is a pure function of its arguments.

#include <span>

#include "fracmph/types.hpp"

namespace fracmph::numerics {

/// (alpha, beta) of E_{alpha,beta}. Only 0 < alpha <= 1 is supported.
struct MLParams {
  double alpha = 1.0;
  double beta = 1.0;
};

/// Tunable tolerances. Defaults are the documented accuracy targets.
struct MLOptions {
  /// Absolute error target for scalar evaluations; the Laplace-inversion
  /// path throws AccuracyError if it cannot certify this.
  double tolerance = 1e-10;
  /// Taylor series is used for |z| <= series_radius.
  double series_radius = 1.0;
  /// Eigenvector condition number above which the matrix routine switches
  /// to the Cauchy-integral fallback.
  double max_condition = 1e6;
  /// Maximum number of trapezoidal nodes on the Cauchy contour.
  int contour_nodes = 256;
  /// Largest tolerated imaginary residue of a real matrix result.
  double imag_tolerance = 1e-8;
};

/// Gamma function for x > 0 (DomainError otherwise).
double gamma(double x);

/// 1/Gamma(x) for any real x; zero at the poles.
double rgamma(double x);

void validate(const MLParams& p);

/// E_{alpha,beta}(z) for real z.
double ml_scalar(const MLParams& p, double z, const MLOptions& opts = {});

/// E_{alpha,beta}(z) for complex z. Used by the matrix routines on complex
/// eigenvalues and contour nodes.
Complex ml_complex(const MLParams& p, Complex z, const MLOptions& opts = {});

/// E_{alpha,beta}(M) = sum_k M^k / Gamma(alpha k + beta).
Matrix ml_matrix(const MLParams& p, const Matrix& m, const MLOptions& opts = {});

/// Evaluates E_{alpha,beta}(s * A) for a fixed square A and varying scalar
/// s >= 0. The spectral decomposition of A is computed once, so repeated
/// evaluation along a grid costs only p scalar Mittag-Leffler calls.
///
/// Strategy: eigendecomposition when the eigenvector matrix has condition
/// number below MLOptions::max_condition, otherwise the Cauchy integral
///   E(M) = (1/2 pi i) \oint E(z) (zI - M)^{-1} dz
/// on a circle about the eigenvalue centroid with radius
/// 1.2 * (eigenvalue spread) + 1, trapezoidal rule refined up to
/// MLOptions::contour_nodes nodes.
class MatrixMLKernel {
 public:
  explicit MatrixMLKernel(Matrix a, MLOptions opts = {});

  /// E_{alpha,beta}(scale * A).
  Matrix evaluate(const MLParams& p, double scale) const;

  /// left^T E_{alpha,beta}(scale * A) right, without forming the matrix
  /// when the eigendecomposition path is active.
  double bilinear(const Vector& left, const MLParams& p, double scale,
                  const Vector& right) const;

  bool uses_eigendecomposition() const noexcept { return diagonalizable_; }
  double condition_number() const noexcept { return condition_; }
  const Matrix& matrix() const noexcept { return a_; }
  Eigen::Index dim() const noexcept { return a_.rows(); }

 private:
  CMatrix contour(const MLParams& p, double scale) const;

  Matrix a_;
  MLOptions opts_;
  CVector eigenvalues_;
  CMatrix vectors_;
  CMatrix inverse_vectors_;
  bool diagonalizable_ = false;
  double condition_ = 0.0;
};

/// e^M (scaling and squaring with Pade approximants).
Matrix matrix_exp(const Matrix& m);

/// Solves A x = b by LU with partial pivoting. Throws SingularMatrixError
/// when a pivot is below pivot_tolerance * max|A|.
Vector solve_linear(const Matrix& a, const Vector& b, double pivot_tolerance = 1e-13);
Matrix solve_linear(const Matrix& a, const Matrix& b, double pivot_tolerance = 1e-13);
CMatrix solve_linear(const CMatrix& a, const CMatrix& b, double pivot_tolerance = 1e-13);

struct CaputoOptions {
  /// Fewer grid points than this is reported as DomainError (grid too coarse).
  std::size_t min_points = 64;
};

/// Caputo derivative of order alpha in (0,1) at the right end t of a uniform
/// grid on [0, t] holding samples f(0), f(h), ..., f(t). The kernel
/// (t - tau)^{-alpha} is integrated exactly on each cell against the
/// finite-difference slope of f (product integration, the L1 scheme).
double caputo_numeric(std::span<const double> samples, double alpha, double t,
                      const CaputoOptions& opts = {});

/// Entrywise version for matrix-valued samples.
Matrix caputo_numeric(std::span<const Matrix> samples, double alpha, double t,
                      const CaputoOptions& opts = {});

}  // namespace fracmph::numerics
