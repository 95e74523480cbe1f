#include <cmath>
#include <deque>
#include <sstream>

#include "fracmph/errors.hpp"
#include "fracmph/numerics.hpp"
#include "fracmph/phase_type.hpp"

namespace fracmph {

namespace {

std::vector<double> cumulative(const std::vector<double>& weights) {
  std::vector<double> cdf(weights.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    cdf[i] = acc;
  }
  return cdf;
}

std::size_t draw(random::RngStream& rng, const std::vector<double>& cdf) {
  const double u = random::sample_uniform(rng) * cdf.back();
  for (std::size_t i = 0; i + 1 < cdf.size(); ++i) {
    if (u < cdf[i]) return i;
  }
  return cdf.size() - 1;
}

}  // namespace

std::size_t PHDist::draw_initial(random::RngStream& rng) const { return draw(rng, initial_cdf_); }

std::size_t PHDist::draw_next(random::RngStream& rng, std::size_t state) const {
  return draw(rng, jump_cdf_[state]);
}

PHDist ph_validate(const Vector& pi, const Matrix& t) {
  std::vector<std::string> errors;
  auto fail = [&](auto&&... parts) {
    std::ostringstream msg;
    (msg << ... << parts);
    errors.push_back(msg.str());
  };

  if (t.rows() != t.cols()) fail("T must be square, got ", t.rows(), "x", t.cols());
  if (t.rows() == 0) fail("T must have at least one state");
  if (pi.size() != t.rows()) fail("pi has ", pi.size(), " entries but T has ", t.rows(), " rows");
  if (!errors.empty()) throw ValidationError(errors);
  if (!t.allFinite()) throw ValidationError("T entries must be finite");
  if (!pi.allFinite()) throw ValidationError("pi entries must be finite");

  const Eigen::Index p = t.rows();
  for (Eigen::Index i = 0; i < p; ++i) {
    if (pi(i) < 0.0) fail("pi[", i, "] = ", pi(i), " is negative");
  }
  if (pi.sum() > 1.0 + 1e-12) fail("pi sums to ", pi.sum(), " > 1");

  const double scale = t.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < p; ++i) {
    if (!(t(i, i) < 0.0)) fail("T[", i, "][", i, "] = ", t(i, i), " must be negative");
    for (Eigen::Index j = 0; j < p; ++j) {
      if (i != j && t(i, j) < 0.0) fail("T[", i, "][", j, "] = ", t(i, j), " must be nonnegative");
    }
    const double row = t.row(i).sum();
    if (row > 1e-12 * scale) fail("row ", i, " of T sums to ", row, " > 0");
  }
  if (!errors.empty()) throw ValidationError(errors);

  Vector exit = -(t * Vector::Ones(p));
  for (Eigen::Index i = 0; i < p; ++i) exit(i) = exit(i) > 0.0 ? exit(i) : 0.0;

  // Every state must reach absorption: backward search from the exit states.
  std::vector<bool> reaches(static_cast<std::size_t>(p), false);
  std::deque<Eigen::Index> queue;
  for (Eigen::Index i = 0; i < p; ++i) {
    if (exit(i) > 0.0) {
      reaches[i] = true;
      queue.push_back(i);
    }
  }
  while (!queue.empty()) {
    const Eigen::Index j = queue.front();
    queue.pop_front();
    for (Eigen::Index i = 0; i < p; ++i) {
      if (!reaches[i] && t(i, j) > 0.0) {
        reaches[i] = true;
        queue.push_back(i);
      }
    }
  }
  for (Eigen::Index i = 0; i < p; ++i) {
    if (!reaches[i]) fail("state ", i, " cannot reach absorption (T is not transient)");
  }
  if (!errors.empty()) throw ValidationError(errors);

  // Transience: T invertible with (-T)^{-1} >= 0 entrywise.
  Matrix green;
  try {
    green = numerics::solve_linear(Matrix(-t), Matrix(Matrix::Identity(p, p)));
  } catch (const SingularMatrixError&) {
    throw ValidationError("T is singular: not all states are transient");
  }
  if (green.minCoeff() < -1e-12 * std::max(1.0, green.cwiseAbs().maxCoeff())) {
    throw ValidationError("(-T)^{-1} has negative entries: T is not a sub-intensity matrix");
  }

  PHDist d;
  d.pi_ = pi;
  d.t_matrix_ = t;
  d.exit_ = exit;
  d.rates_ = -t.diagonal();
  d.mass_ = std::min(pi.sum(), 1.0);
  d.embedded_ = Matrix::Zero(p, p + 1);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      if (i != j) d.embedded_(i, j) = t(i, j) / d.rates_(i);
    }
    d.embedded_(i, p) = exit(i) / d.rates_(i);
  }

  std::vector<double> initial(pi.data(), pi.data() + p);
  initial.push_back(std::max(0.0, 1.0 - pi.sum()));
  d.initial_cdf_ = cumulative(initial);
  d.jump_cdf_.reserve(static_cast<std::size_t>(p));
  for (Eigen::Index i = 0; i < p; ++i) {
    std::vector<double> row(static_cast<std::size_t>(p + 1));
    for (Eigen::Index j = 0; j <= p; ++j) row[j] = d.embedded_(i, j);
    d.jump_cdf_.push_back(cumulative(row));
  }
  return d;
}

double ph_density(const PHDist& d, double x) {
  if (!(x >= 0.0)) throw DomainError("ph_density: x must be nonnegative");
  return d.pi().dot(numerics::matrix_exp(d.T() * x) * d.exit());
}

double ph_cdf(const PHDist& d, double x) {
  if (!(x >= 0.0)) throw DomainError("ph_cdf: x must be nonnegative");
  const Vector survival = numerics::matrix_exp(d.T() * x) * Vector::Ones(d.dim());
  return 1.0 - d.pi().dot(survival);
}

double ph_laplace(const PHDist& d, double u) {
  if (!(u >= 0.0)) throw DomainError("ph_laplace: u must be nonnegative");
  const Eigen::Index p = d.dim();
  const Matrix resolvent = u * Matrix::Identity(p, p) - d.T();
  return d.atom() + d.pi().dot(numerics::solve_linear(resolvent, d.exit()));
}

PathRecord ph_sample_path(random::RngStream& rng, const PHDist& d) {
  PathRecord path;
  path.total = detail::walk_path(
      rng, d, [&](std::size_t state) { return random::sample_exponential(rng, d.rates()(state)); },
      [&](std::size_t state, double length) {
        path.states.push_back(state);
        path.sojourns.push_back(length);
      });
  return path;
}

}  // namespace fracmph
