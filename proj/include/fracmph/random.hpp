#pragma once

// Seedable random variates. The base generator is Philox4x32-10
// (Salmon et al., "Parallel random numbers: as easy as 1, 2, 3"), a
// counter-based generator: the key is the 64-bit seed, the upper half of
// the 128-bit counter is the stream id and the lower half is the block
// index. Streams with different ids never overlap, and the output is a
// pure function of (seed, stream id, position) on every platform.
//
// The algorithm is part of the public contract: changing it changes every
// seeded result and requires a major version bump.

#include <array>
#include <cstdint>
#include <span>

namespace fracmph::random {

class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0) noexcept
      : seed_(seed), stream_(stream_id) {}

  std::uint64_t next_u64() noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_; }
  /// Number of 64-bit words consumed so far.
  std::uint64_t position() const noexcept { return 2 * block_ - (have_ ? 1 : 0); }

  /// One Philox4x32-10 block, exposed for known-answer tests.
  static std::array<std::uint32_t, 4> philox(std::array<std::uint32_t, 4> counter,
                                             std::array<std::uint32_t, 2> key) noexcept;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::uint64_t buffered_ = 0;
  bool have_ = false;
};

/// Uniform on the open interval (0, 1), 53-bit resolution.
double sample_uniform(RngStream& rng) noexcept;

/// Exponential with the given rate via -log(U) / rate.
double sample_exponential(RngStream& rng, double rate);

/// Index drawn from a probability vector (entries >= 0, sum 1 +- 1e-12).
std::size_t sample_discrete(RngStream& rng, std::span<const double> probs);

/// Positive stable S with E exp(-u S) = exp(-u^alpha), by Kanter's
/// representation. alpha = 1 returns exactly 1.
double sample_positive_stable(RngStream& rng, double alpha);

/// Mittag-Leffler ML(alpha, lambda) variate with Laplace transform
/// lambda / (lambda + u^alpha), as W^{1/alpha} S with W ~ Exp(lambda).
double sample_ml(RngStream& rng, double alpha, double lambda);

}  // namespace fracmph::random
