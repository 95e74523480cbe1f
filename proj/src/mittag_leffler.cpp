#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

#include "fracmph/errors.hpp"
#include "fracmph/numerics.hpp"

namespace fracmph::numerics {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
// log of the double-precision unit roundoff 2^-52
constexpr double kLogEps = -36.043653389117154;
// log(1e-15): the target of the Laplace inversion before any relaxation
constexpr double kLogTarget = -34.538776394910684;

// Neumaier-compensated Taylor series. Valid for |z| <= ~1 where the terms
// decrease monotonically after the first few, so there is no cancellation.
template <typename T>
T ml_series(const MLParams& p, T z) {
  T sum{0.0};
  T comp{0.0};
  T power{1.0};
  for (int k = 0; k < 400; ++k) {
    const T term = power * rgamma(p.alpha * k + p.beta);
    const T next = sum + term;
    if (std::abs(sum) >= std::abs(term)) {
      comp += (sum - next) + term;
    } else {
      comp += (term - next) + sum;
    }
    sum = next;
    if (k > 4 && std::abs(term) <= 1e-18 * std::abs(sum + comp)) break;
    power *= z;
  }
  return sum + comp;
}

struct Contour {
  double mu = 0.0;
  double h = 0.0;
  double n = kInf;  // number of half-nodes; +inf marks an inadmissible region
};

// Optimal parabolic contour for a region bounded by two singularities
// (Garrappa 2015, Sec. 3).
Contour optimal_bounded(double phi_j, double phi_j1, double pj, double qj,
                        double log_epsilon) {
  constexpr double fac = 1.01;
  const double f_max = std::exp(log_epsilon - kLogEps);
  const double sq_phi_j = std::sqrt(phi_j);
  const double threshold = 2.0 * std::sqrt(log_epsilon - kLogEps);
  const double sq_phi_j1 = std::min(std::sqrt(phi_j1), threshold - sq_phi_j);

  double sq_bar_j = 0.0;
  double sq_bar_j1 = 0.0;
  double f_bar = 1.0;
  bool admissible = false;

  if (pj < 1e-14 && qj < 1e-14) {
    sq_bar_j = sq_phi_j;
    sq_bar_j1 = sq_phi_j1;
    admissible = true;
  } else if (pj < 1e-14) {
    sq_bar_j = sq_phi_j;
    const double f_min =
        sq_phi_j > 0.0 ? fac * std::pow(sq_phi_j / (sq_phi_j1 - sq_phi_j), qj) : fac;
    if (f_min < f_max) {
      f_bar = f_min + f_min / f_max * (f_max - f_min);
      const double fq = std::pow(f_bar, -1.0 / qj);
      sq_bar_j1 = (2.0 * sq_phi_j1 - fq * sq_phi_j) / (2.0 + fq);
      admissible = true;
    }
  } else if (qj < 1e-14) {
    sq_bar_j1 = sq_phi_j1;
    const double f_min = fac * std::pow(sq_phi_j1 / (sq_phi_j1 - sq_phi_j), pj);
    if (f_min < f_max) {
      f_bar = f_min + f_min / f_max * (f_max - f_min);
      const double fp = std::pow(f_bar, -1.0 / pj);
      sq_bar_j = (2.0 * sq_phi_j + fp * sq_phi_j1) / (2.0 - fp);
      admissible = true;
    }
  } else {
    double f_min = fac * (sq_phi_j + sq_phi_j1) /
                   std::pow(sq_phi_j1 - sq_phi_j, std::max(pj, qj));
    if (f_min < f_max) {
      f_min = std::max(f_min, 1.5);
      f_bar = f_min + f_min / f_max * (f_max - f_min);
      const double fp = std::pow(f_bar, -1.0 / pj);
      const double fq = std::pow(f_bar, -1.0 / qj);
      const double w = -phi_j1 / log_epsilon;
      const double den = 2.0 + w - (1.0 + w) * fp + fq;
      sq_bar_j = ((2.0 + w + fq) * sq_phi_j + fp * sq_phi_j1) / den;
      sq_bar_j1 = (-(1.0 + w) * fq * sq_phi_j + (2.0 + w - (1.0 + w) * fp) * sq_phi_j1) / den;
      admissible = true;
    }
  }
  if (!admissible) return {};

  const double log_eps = log_epsilon - std::log(f_bar);
  const double w = -sq_bar_j1 * sq_bar_j1 / log_eps;
  const double mu = std::pow(((1.0 + w) * sq_bar_j + sq_bar_j1) / (2.0 + w), 2);
  const double h = -2.0 * kPi / log_eps * (sq_bar_j1 - sq_bar_j) /
                   ((1.0 + w) * sq_bar_j + sq_bar_j1);
  const double n = std::ceil(std::sqrt(1.0 - log_eps / mu) / h);
  return {mu, h, n};
}

// Optimal parabolic contour for the unbounded right-most region.
Contour optimal_unbounded(double phi_j, double pj, double log_epsilon) {
  const double sq_phi_j = std::sqrt(phi_j);
  double phi_bar = phi_j > 0.0 ? phi_j * 1.01 : 0.01;
  double sq_phi_bar = std::sqrt(phi_bar);

  constexpr double f_min = 1.0;
  constexpr double f_max = 10.0;
  constexpr double f_tar = 5.0;

  double n = 0.0;
  double a = 0.0;
  double sq_mu = 0.0;
  for (int iter = 0; iter < 200; ++iter) {
    const double log_eps_phi = log_epsilon / phi_bar;
    n = std::ceil(phi_bar / kPi * (1.0 - 1.5 * log_eps_phi + std::sqrt(1.0 - 2.0 * log_eps_phi)));
    a = kPi * n / phi_bar;
    sq_mu = sq_phi_bar * std::abs(4.0 - a) / std::abs(7.0 - std::sqrt(1.0 + 12.0 * a));
    const double f_bar = std::pow((sq_phi_bar - sq_phi_j) / sq_mu, -pj);
    if (pj < 1e-14 || (f_min < f_bar && f_bar < f_max)) break;
    sq_phi_bar = std::pow(f_tar, -1.0 / pj) * sq_mu + sq_phi_j;
    phi_bar = sq_phi_bar * sq_phi_bar;
  }
  double mu = sq_mu * sq_mu;
  double h = (-3.0 * a - 2.0 + 2.0 * std::sqrt(1.0 + 12.0 * a)) / (4.0 - a) / n;

  const double threshold = log_epsilon - kLogEps;
  if (mu > threshold) {
    const double q = std::abs(pj) < 1e-14 ? 0.0 : std::pow(f_tar, -1.0 / pj) * std::sqrt(mu);
    phi_bar = std::pow(q + std::sqrt(phi_j), 2);
    if (phi_bar < threshold) {
      const double w = std::sqrt(kLogEps / (kLogEps - log_epsilon));
      const double u = std::sqrt(-phi_bar / kLogEps);
      mu = threshold;
      n = std::ceil(w * log_epsilon / 2.0 / kPi / (u * w - 1.0));
      h = std::sqrt(kLogEps / (kLogEps - log_epsilon)) / n;
    } else {
      return {};
    }
  }
  return {mu, h, n};
}

// E_{alpha,beta}(lambda) by inversion of the Laplace transform
// s^{alpha-beta} / (s^alpha - lambda) along an optimal parabolic contour,
// adding residues of the poles not enclosed by the chosen contour.
Complex ml_laplace_inversion(const MLParams& p, Complex lambda, double tolerance) {
  const double alpha = p.alpha;
  const double beta = p.beta;
  const double theta = std::arg(lambda);
  const double abs_lambda = std::abs(lambda);

  const int kmin = static_cast<int>(std::ceil(-alpha / 2.0 - theta / (2.0 * kPi)));
  const int kmax = static_cast<int>(std::floor(alpha / 2.0 - theta / (2.0 * kPi)));

  struct Pole {
    Complex s;
    double phi;
  };
  std::vector<Pole> poles;
  for (int k = kmin; k <= kmax; ++k) {
    const Complex s = std::pow(abs_lambda, 1.0 / alpha) *
                      std::exp(Complex(0.0, (theta + 2.0 * k * kPi) / alpha));
    const double phi = (s.real() + std::abs(s)) / 2.0;
    if (phi > 1e-15) poles.push_back({s, phi});
  }
  std::sort(poles.begin(), poles.end(),
            [](const Pole& a, const Pole& b) { return a.phi < b.phi; });

  // Singularities ordered by phi: the branch point at 0, then the poles.
  std::vector<Complex> s_star{Complex(0.0)};
  std::vector<double> phi{0.0};
  for (const auto& pole : poles) {
    s_star.push_back(pole.s);
    phi.push_back(pole.phi);
  }
  const std::size_t regions = s_star.size();
  phi.push_back(kInf);

  std::vector<double> pw(regions, 1.0);
  std::vector<double> qw(regions, 1.0);
  pw[0] = std::max(0.0, -2.0 * (alpha - beta + 1.0));
  qw[regions - 1] = kInf;

  double log_epsilon = kLogTarget;
  Contour best;
  std::size_t best_region = 0;
  for (;;) {
    best = {};
    for (std::size_t j = 0; j < regions; ++j) {
      if (!(phi[j] < log_epsilon - kLogEps && phi[j] < phi[j + 1])) continue;
      const Contour c = (j + 1 < regions)
                            ? optimal_bounded(phi[j], phi[j + 1], pw[j], qw[j], log_epsilon)
                            : optimal_unbounded(phi[j], pw[j], log_epsilon);
      if (c.n < best.n) {
        best = c;
        best_region = j;
      }
    }
    if (best.n <= 200.0) break;
    log_epsilon += std::log(10.0);
    if (std::exp(log_epsilon) > tolerance) {
      std::ostringstream msg;
      msg << "Mittag-Leffler E_{" << alpha << "," << beta << "}(" << lambda
          << "): contour quadrature cannot reach tolerance " << tolerance;
      throw AccuracyError(msg.str());
    }
  }

  const int n = static_cast<int>(best.n);
  Complex integral(0.0);
  for (int k = -n; k <= n; ++k) {
    const double u = best.h * k;
    const Complex z = best.mu * std::pow(Complex(1.0, u), 2);
    const Complex zd(-2.0 * best.mu * u, 2.0 * best.mu);
    const Complex f = std::pow(z, alpha - beta) / (std::pow(z, alpha) - lambda) * zd;
    integral += std::exp(z) * f;
  }
  integral *= best.h / (2.0 * kPi * Complex(0.0, 1.0));

  Complex residues(0.0);
  for (std::size_t j = best_region + 1; j < regions; ++j) {
    residues += std::pow(s_star[j], 1.0 - beta) * std::exp(s_star[j]) / alpha;
  }
  return integral + residues;
}

}  // namespace

double gamma(double x) {
  if (!(x > 0.0)) {
    std::ostringstream msg;
    msg << "gamma: argument must be positive, got " << x;
    throw DomainError(msg.str());
  }
  return std::tgamma(x);
}

double rgamma(double x) {
  if (x <= 0.0 && x == std::floor(x)) return 0.0;
  if (x > 171.0) return std::exp(-std::lgamma(x));
  return 1.0 / std::tgamma(x);
}

void validate(const MLParams& p) {
  if (!(p.alpha > 0.0 && p.alpha <= 1.0)) {
    std::ostringstream msg;
    msg << "Mittag-Leffler alpha must lie in (0,1], got " << p.alpha;
    throw DomainError(msg.str());
  }
  if (!std::isfinite(p.beta)) throw DomainError("Mittag-Leffler beta must be finite");
}

Complex ml_complex(const MLParams& p, Complex z, const MLOptions& opts) {
  validate(p);
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw DomainError("Mittag-Leffler argument must be finite");
  }
  if (p.alpha == 1.0 && p.beta == 1.0) return std::exp(z);
  if (std::abs(z) < 1e-15) return Complex(rgamma(p.beta));
  if (std::abs(z) <= opts.series_radius) return ml_series(p, z);
  return ml_laplace_inversion(p, z, opts.tolerance);
}

double ml_scalar(const MLParams& p, double z, const MLOptions& opts) {
  validate(p);
  if (!std::isfinite(z)) throw DomainError("Mittag-Leffler argument must be finite");
  if (p.alpha == 1.0 && p.beta == 1.0) return std::exp(z);
  if (std::abs(z) < 1e-15) return rgamma(p.beta);
  if (std::abs(z) <= opts.series_radius) return ml_series(p, z);
  return ml_laplace_inversion(p, Complex(z, 0.0), opts.tolerance).real();
}

MatrixMLKernel::MatrixMLKernel(Matrix a, MLOptions opts) : a_(std::move(a)), opts_(opts) {
  if (a_.rows() != a_.cols() || a_.rows() == 0) {
    throw DomainError("MatrixMLKernel: matrix must be square and non-empty");
  }
  if (!a_.allFinite()) throw DomainError("MatrixMLKernel: matrix entries must be finite");

  Eigen::EigenSolver<Matrix> solver(a_, true);
  if (solver.info() != Eigen::Success) {
    diagonalizable_ = false;
    condition_ = kInf;
    return;
  }
  eigenvalues_ = solver.eigenvalues();
  vectors_ = solver.eigenvectors();
  Eigen::JacobiSVD<CMatrix> svd(vectors_);
  const auto& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  condition_ = smin > 0.0 ? sv(0) / smin : kInf;
  diagonalizable_ = condition_ < opts_.max_condition;
  if (diagonalizable_) inverse_vectors_ = vectors_.inverse();
}

CMatrix MatrixMLKernel::contour(const MLParams& p, double scale) const {
  const Eigen::Index dim = a_.rows();
  const CMatrix m = (a_ * scale).cast<Complex>();

  Complex centroid(0.0);
  for (Eigen::Index i = 0; i < eigenvalues_.size(); ++i) centroid += eigenvalues_(i) * scale;
  double spread = 0.0;
  if (eigenvalues_.size() == dim) {
    centroid /= static_cast<double>(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
      spread = std::max(spread, std::abs(eigenvalues_(i) * scale - centroid));
    }
  } else {
    centroid = Complex(m.trace() / static_cast<double>(dim));
    spread = (m - centroid * CMatrix::Identity(dim, dim)).norm();
  }
  const double radius = 1.2 * spread + 1.0;
  const CMatrix identity = CMatrix::Identity(dim, dim);

  // Nested trapezoidal sums: every refinement reuses the previous nodes.
  auto node = [&](int k, int n) {
    const Complex e = std::exp(Complex(0.0, 2.0 * kPi * k / n));
    const Complex z = centroid + radius * e;
    const CMatrix resolvent = solve_linear(CMatrix(z * identity - m), identity);
    return CMatrix(ml_complex(p, z, opts_) * radius * e * resolvent);
  };

  int n = 16;
  CMatrix sum = CMatrix::Zero(dim, dim);
  for (int k = 0; k < n; ++k) sum += node(k, n);
  CMatrix estimate = sum / static_cast<double>(n);
  while (2 * n <= opts_.contour_nodes) {
    const int refined = 2 * n;
    for (int k = 1; k < refined; k += 2) sum += node(k, refined);
    const CMatrix next = sum / static_cast<double>(refined);
    const double change = (next - estimate).norm();
    estimate = next;
    n = refined;
    // the trapezoidal rule converges geometrically here, so the change of
    // the coarser estimate bounds the error of the finer one
    if (change <= opts_.tolerance * std::max(1.0, estimate.norm())) return estimate;
  }
  throw AccuracyError("matrix Mittag-Leffler: Cauchy contour quadrature did not converge within " +
                      std::to_string(opts_.contour_nodes) + " nodes");
}

Matrix MatrixMLKernel::evaluate(const MLParams& p, double scale) const {
  validate(p);
  const Eigen::Index dim = a_.rows();
  CMatrix result;
  if (diagonalizable_) {
    CVector values(dim);
    for (Eigen::Index i = 0; i < dim; ++i) values(i) = ml_complex(p, eigenvalues_(i) * scale, opts_);
    result = vectors_ * values.asDiagonal() * inverse_vectors_;
  } else {
    result = contour(p, scale);
  }
  const Matrix re = result.real();
  if (result.imag().norm() > opts_.imag_tolerance * std::max(1.0, re.norm())) {
    throw AccuracyError("matrix Mittag-Leffler: non-negligible imaginary residue");
  }
  return re;
}

double MatrixMLKernel::bilinear(const Vector& left, const MLParams& p, double scale,
                                const Vector& right) const {
  if (!diagonalizable_) return left.dot(evaluate(p, scale) * right);
  validate(p);
  const CVector l = vectors_.transpose() * left.cast<Complex>();
  const CVector r = inverse_vectors_ * right.cast<Complex>();
  Complex sum(0.0);
  for (Eigen::Index i = 0; i < l.size(); ++i) {
    sum += l(i) * ml_complex(p, eigenvalues_(i) * scale, opts_) * r(i);
  }
  return sum.real();
}

Matrix ml_matrix(const MLParams& p, const Matrix& m, const MLOptions& opts) {
  return MatrixMLKernel(m, opts).evaluate(p, 1.0);
}

}  // namespace fracmph::numerics
