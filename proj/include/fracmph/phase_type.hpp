#pragma once

// Classical phase-type laws PH(pi, T): absorption time of a Markov jump
// process on p transient states plus one absorbing state.
//
// An initial vector with pi e < 1 is allowed throughout and puts an atom of
// size 1 - pi e at zero.

#include <cstddef>
#include <vector>

#include "fracmph/random.hpp"
#include "fracmph/types.hpp"

namespace fracmph {

/// One simulated trajectory up to absorption. States are 0-based. An empty
/// record means absorption at time zero (the atom).
struct PathRecord {
  std::vector<std::size_t> states;
  std::vector<double> sojourns;
  double total = 0.0;

  bool empty() const noexcept { return states.empty(); }
};

/// Validated (pi, T) together with the derived quantities every evaluator
/// and sampler needs. Immutable; obtain through ph_validate.
class PHDist {
 public:
  const Vector& pi() const noexcept { return pi_; }
  const Matrix& T() const noexcept { return t_matrix_; }
  /// Exit vector t = -T e.
  const Vector& exit() const noexcept { return exit_; }
  /// Holding rates lambda_i = -T_ii.
  const Vector& rates() const noexcept { return rates_; }
  /// Embedded chain, p x (p+1); column p is the absorbing state.
  const Matrix& embedded() const noexcept { return embedded_; }
  double mass() const noexcept { return mass_; }
  double atom() const noexcept { return 1.0 - mass_; }
  Eigen::Index dim() const noexcept { return pi_.size(); }

  /// First state of a path (p means immediate absorption).
  std::size_t draw_initial(random::RngStream& rng) const;
  /// Next state after leaving `state` (p means absorption).
  std::size_t draw_next(random::RngStream& rng, std::size_t state) const;

 private:
  friend PHDist ph_validate(const Vector& pi, const Matrix& t);
  PHDist() = default;

  Vector pi_;
  Matrix t_matrix_;
  Vector exit_;
  Vector rates_;
  Matrix embedded_;
  double mass_ = 1.0;
  std::vector<double> initial_cdf_;
  std::vector<std::vector<double>> jump_cdf_;
};

/// Checks every invariant of (pi, T) and returns the validated law, or
/// throws ValidationError listing each violated invariant.
PHDist ph_validate(const Vector& pi, const Matrix& t);

/// Density of the absolutely continuous part, pi e^{Tx} t (x >= 0).
double ph_density(const PHDist& d, double x);
/// 1 - pi e^{Tx} e; equals the atom 1 - pi e at x = 0.
double ph_cdf(const PHDist& d, double x);
/// (1 - pi e) + pi (uI - T)^{-1} t for u >= 0.
double ph_laplace(const PHDist& d, double u);

PathRecord ph_sample_path(random::RngStream& rng, const PHDist& d);

namespace detail {

/// Walks the embedded chain of d, drawing each sojourn with
/// `sojourn(state)` and reporting it with `visit(state, length)`. Returns
/// the total time.
template <typename Sojourn, typename Visit>
double walk_path(random::RngStream& rng, const PHDist& d, Sojourn&& sojourn, Visit&& visit) {
  const auto p = static_cast<std::size_t>(d.dim());
  double total = 0.0;
  for (std::size_t state = d.draw_initial(rng); state < p; state = d.draw_next(rng, state)) {
    const double length = sojourn(state);
    visit(state, length);
    total += length;
  }
  return total;
}

}  // namespace detail

}  // namespace fracmph
