#include <cmath>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "fracmph/errors.hpp"
#include "fracmph/numerics.hpp"

namespace fracmph {

namespace {
std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += "; ";
    out += parts[i];
  }
  return out;
}
}  // namespace

ValidationError::ValidationError(std::vector<std::string> violations)
    : Error(join(violations)), violations_(std::move(violations)) {
  if (violations_.empty()) violations_.emplace_back("invalid parameters");
}

}  // namespace fracmph

namespace fracmph::numerics {

Matrix matrix_exp(const Matrix& m) {
  if (m.rows() != m.cols()) throw DomainError("matrix_exp: matrix must be square");
  if (!m.allFinite()) throw DomainError("matrix_exp: entries must be finite");
  if (m.size() == 0) return m;
  return m.exp();
}

namespace {

template <typename Mat>
auto lu_checked(const Mat& a, double pivot_tolerance) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw DomainError("solve_linear: matrix must be square and non-empty");
  }
  Eigen::PartialPivLU<Mat> lu(a);
  const double scale = a.cwiseAbs().maxCoeff();
  const auto diag = lu.matrixLU().diagonal().cwiseAbs();
  if (!(scale > 0.0) || diag.minCoeff() <= pivot_tolerance * scale) {
    std::ostringstream msg;
    msg << "solve_linear: matrix is numerically singular (min pivot " << diag.minCoeff()
        << ", scale " << scale << ")";
    throw SingularMatrixError(msg.str());
  }
  return lu;
}

}  // namespace

Vector solve_linear(const Matrix& a, const Vector& b, double pivot_tolerance) {
  if (b.size() != a.rows()) throw DomainError("solve_linear: dimension mismatch");
  return lu_checked(a, pivot_tolerance).solve(b);
}

Matrix solve_linear(const Matrix& a, const Matrix& b, double pivot_tolerance) {
  if (b.rows() != a.rows()) throw DomainError("solve_linear: dimension mismatch");
  return lu_checked(a, pivot_tolerance).solve(b);
}

CMatrix solve_linear(const CMatrix& a, const CMatrix& b, double pivot_tolerance) {
  if (b.rows() != a.rows()) throw DomainError("solve_linear: dimension mismatch");
  return lu_checked(a, pivot_tolerance).solve(b);
}

namespace {

void check_caputo_args(std::size_t points, double alpha, double t, const CaputoOptions& opts) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("caputo_numeric: alpha must lie in (0,1)");
  if (!(t > 0.0)) throw DomainError("caputo_numeric: t must be positive");
  if (points < std::max<std::size_t>(opts.min_points, 2)) {
    throw DomainError("caputo_numeric: grid too coarse (" + std::to_string(points) +
                      " points, need at least " + std::to_string(opts.min_points) + ")");
  }
}

// Weight of the forward difference f_{j+1} - f_j: the exact integral of
// (t - tau)^{-alpha} over cell j, divided by h Gamma(1 - alpha).
std::vector<double> l1_weights(std::size_t intervals, double alpha, double t) {
  const double h = t / static_cast<double>(intervals);
  const double norm = 1.0 / (h * std::tgamma(2.0 - alpha));
  std::vector<double> w(intervals);
  for (std::size_t j = 0; j < intervals; ++j) {
    const double left = t - h * static_cast<double>(j);
    const double right = t - h * static_cast<double>(j + 1);
    w[j] = norm * (std::pow(left, 1.0 - alpha) - std::pow(std::max(right, 0.0), 1.0 - alpha));
  }
  return w;
}

}  // namespace

double caputo_numeric(std::span<const double> samples, double alpha, double t,
                      const CaputoOptions& opts) {
  check_caputo_args(samples.size(), alpha, t, opts);
  const std::size_t intervals = samples.size() - 1;
  const auto w = l1_weights(intervals, alpha, t);
  double sum = 0.0;
  for (std::size_t j = 0; j < intervals; ++j) sum += w[j] * (samples[j + 1] - samples[j]);
  return sum;
}

Matrix caputo_numeric(std::span<const Matrix> samples, double alpha, double t,
                      const CaputoOptions& opts) {
  check_caputo_args(samples.size(), alpha, t, opts);
  const std::size_t intervals = samples.size() - 1;
  const auto w = l1_weights(intervals, alpha, t);
  Matrix sum = Matrix::Zero(samples[0].rows(), samples[0].cols());
  for (std::size_t j = 0; j < intervals; ++j) sum += w[j] * (samples[j + 1] - samples[j]);
  return sum;
}

}  // namespace fracmph::numerics
