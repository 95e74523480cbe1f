#pragma once

// Executable checks of the distributional identities: Monte Carlo against
// analytic transforms, sampler against sampler, projections, tail indices
// and the fractional Kolmogorov equations. Each check yields a CheckReport;
// reports serialize to one JSON object per line.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fracmph/frac_phase.hpp"
#include "fracmph/mph.hpp"
#include "fracmph/random.hpp"

namespace fracmph::verify {

struct CheckReport {
  std::string name;
  bool pass = false;
  double observed = 0.0;
  double threshold = 0.0;
  std::size_t sample_size = 0;
  std::uint64_t seed = 0;
  double wall_time = 0.0;  ///< seconds; not part of the reproducible content
  nlohmann::ordered_json details = nlohmann::ordered_json::object();

  /// Sets pass = observed <= threshold.
  void settle() { pass = observed <= threshold; }
  nlohmann::ordered_json to_json(bool with_wall_time = true) const;
};

enum class SamplerKind { Path, Product };
SamplerKind parse_sampler(std::string_view name);
const char* sampler_name(SamplerKind kind);

using Sampler = std::function<Vector(random::RngStream&)>;
Sampler make_sampler(const MPHAlphaDist& d, SamplerKind kind);

/// Number of draws taken from each stream in draw_samples.
inline constexpr std::size_t kChunkSize = 8192;

/// n draws as rows of an n x dim matrix. Chunk c (of kChunkSize draws) uses
/// stream id (stream << 32) | c, so results depend only on (seed, stream, n).
Matrix draw_samples(const Sampler& sampler, Eigen::Index dim, std::size_t n, std::uint64_t seed,
                    std::uint64_t stream);

/// max over theta of |mean exp(-<Y,theta>) - analytic(theta)| / SE,
/// threshold 4. Requires n >= 1e4.
CheckReport check_laplace(const Sampler& sampler, Eigen::Index dim,
                          const std::function<double(const Vector&)>& analytic,
                          const std::vector<Vector>& thetas, std::size_t n, std::uint64_t seed,
                          std::uint64_t stream, std::string name);
CheckReport check_laplace(const MPHAlphaDist& d, SamplerKind kind, const std::vector<Vector>& thetas,
                          std::size_t n, std::uint64_t seed, std::uint64_t stream = 1);

/// Componentwise two-sample KS between the path sampler of `path_model` and
/// the product sampler of `product_model`; threshold 1.5 x the 95% band.
CheckReport check_sampler_agreement(const MPHAlphaDist& path_model, const MPHAlphaDist& product_model,
                                    std::size_t n, std::uint64_t seed, std::uint64_t stream = 2);
CheckReport check_sampler_agreement(const MPHAlphaDist& d, std::size_t n, std::uint64_t seed,
                                    std::uint64_t stream = 2);

/// Empirical law of <Y,w> against the projected PH_alpha law plus atom.
/// observed = max(sup-distance / 0.02, |atom frequency - atom| / (3 SE)),
/// threshold 1; both raw statistics are in the details.
CheckReport check_projection(const MPHAlphaDist& d, const Vector& w, std::size_t n,
                             std::uint64_t seed, SamplerKind kind = SamplerKind::Path,
                             std::uint64_t stream = 3);

struct TailOptions {
  /// Optional power transform Y_k = X_k^{1/nu_k} applied to the draws.
  std::optional<Vector> nu;
  /// Index the slope is compared against; defaults to alpha nu_k (alpha
  /// without a transform).
  std::optional<double> expected_index;
  SamplerKind sampler = SamplerKind::Path;
  double tolerance = 0.1;
  double fraction = 0.1;
};

/// |log-survival slope + expected index| over the top decile of component k
/// (0-based). Skipped (pass) when alpha = 1, where the tail is light.
CheckReport check_tail_index(const MPHAlphaDist& d, Eigen::Index component, std::size_t n,
                             std::uint64_t seed, const TailOptions& opts = {},
                             std::uint64_t stream = 4);

struct KolmogorovOptions {
  /// Uniform cells on [0, t] for the Caputo quadrature.
  std::size_t intervals = 4000;
  double tolerance = 1e-3;
};

/// Relative error of the numerical Caputo derivative of P(t) = E_{alpha,1}(T t^alpha)
/// against T P(t) and P(t) T, maximised over `times`. At alpha = 1 the
/// ordinary derivative is taken by a second-order one-sided difference.
CheckReport check_kolmogorov(const FracPHDist& d, const std::vector<double>& times,
                             const KolmogorovOptions& opts = {});

enum class Suite { Fast, Full };
Suite parse_suite(std::string_view name);

/// Runs the check battery for a model. Fast uses reduced sample sizes and
/// skips the tail checks; Full uses the reference sizes.
std::vector<CheckReport> run_suite(const MPHAlphaDist& d, Suite suite, std::uint64_t seed);

}  // namespace fracmph::verify
