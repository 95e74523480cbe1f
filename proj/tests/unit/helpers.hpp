#pragma once

#include <cmath>

#include "fracmph/phase_type.hpp"
#include "fracmph/random.hpp"

namespace testutil {

/// Random p-state sub-intensity matrix with strictly positive exit rates
/// and a random initial vector on the simplex.
struct RandomPH {
  fracmph::Vector pi;
  fracmph::Matrix T;
};

inline RandomPH random_ph(fracmph::random::RngStream& rng, int p, double mass = 1.0) {
  using namespace fracmph;
  RandomPH out{Vector(p), Matrix::Zero(p, p)};
  for (int i = 0; i < p; ++i) out.pi(i) = random::sample_exponential(rng, 1.0);
  out.pi *= mass / out.pi.sum();
  for (int i = 0; i < p; ++i) {
    double row = 0.0;
    for (int j = 0; j < p; ++j) {
      if (i == j) continue;
      out.T(i, j) = random::sample_uniform(rng) * 2.0;
      row += out.T(i, j);
    }
    out.T(i, i) = -(row + 0.2 + random::sample_uniform(rng) * 2.0);
  }
  return out;
}

inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

}  // namespace testutil
