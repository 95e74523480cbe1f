#include <cmath>
#include <numbers>
#include <sstream>

#include "fracmph/errors.hpp"
#include "fracmph/random.hpp"

namespace fracmph::random {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(product >> 32);
  lo = static_cast<std::uint32_t>(product);
}

}  // namespace

std::array<std::uint32_t, 4> RngStream::philox(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) noexcept {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

std::uint64_t RngStream::next_u64() noexcept {
  if (have_) {
    have_ = false;
    return buffered_;
  }
  const std::array<std::uint32_t, 4> ctr{
      static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
      static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
  const std::array<std::uint32_t, 2> key{static_cast<std::uint32_t>(seed_),
                                         static_cast<std::uint32_t>(seed_ >> 32)};
  const auto out = philox(ctr, key);
  ++block_;
  buffered_ = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
  have_ = true;
  return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

double sample_uniform(RngStream& rng) noexcept {
  // midpoint of one of 2^53 equal cells: never 0 or 1
  return (static_cast<double>(rng.next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double sample_exponential(RngStream& rng, double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw DomainError("sample_exponential: rate must be positive and finite");
  }
  return -std::log(sample_uniform(rng)) / rate;
}

std::size_t sample_discrete(RngStream& rng, std::span<const double> probs) {
  if (probs.empty()) throw DomainError("sample_discrete: empty probability vector");
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw DomainError("sample_discrete: probabilities must be finite and nonnegative");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    std::ostringstream msg;
    msg << "sample_discrete: probabilities sum to " << total << ", expected 1";
    throw DomainError(msg.str());
  }
  const double u = sample_uniform(rng) * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] > 0.0) last_positive = i;
    acc += probs[i];
    if (u < acc) return i;
  }
  return last_positive;
}

double sample_positive_stable(RngStream& rng, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw DomainError("sample_positive_stable: alpha must lie in (0,1]");
  }
  if (alpha == 1.0) return 1.0;

  double u = 0.0;
  double sin_u = 0.0;
  do {
    u = std::numbers::pi * sample_uniform(rng);
    sin_u = std::sin(u);
  } while (sin_u < 1e-300);
  const double e = sample_exponential(rng, 1.0);

  // Kanter: S = (A(U) / E)^{(1-alpha)/alpha},
  // A(U) = sin((1-alpha)U) sin(alpha U)^{alpha/(1-alpha)} / sin(U)^{1/(1-alpha)}
  const double beta = 1.0 - alpha;
  const double log_a = std::log(std::sin(beta * u)) +
                       (alpha / beta) * std::log(std::sin(alpha * u)) -
                       std::log(sin_u) / beta;
  return std::exp((beta / alpha) * (log_a - std::log(e)));
}

double sample_ml(RngStream& rng, double alpha, double lambda) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("sample_ml: alpha must lie in (0,1]");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw DomainError("sample_ml: lambda must be positive and finite");
  }
  const double w = sample_exponential(rng, lambda);
  if (alpha == 1.0) return w;
  return std::pow(w, 1.0 / alpha) * sample_positive_stable(rng, alpha);
}

}  // namespace fracmph::random
