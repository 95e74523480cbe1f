#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "fracmph/errors.hpp"
#include "fracmph/stats.hpp"
#include "fracmph/verify.hpp"

namespace fracmph::verify {

namespace {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

nlohmann::ordered_json to_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

std::vector<double> column(const Matrix& m, Eigen::Index k) {
  return std::vector<double>(m.col(k).data(), m.col(k).data() + m.rows());
}

void require_samples(std::size_t n, std::size_t minimum, const char* who) {
  if (n < minimum) {
    std::ostringstream msg;
    msg << who << ": needs at least " << minimum << " draws, got " << n;
    throw DomainError(msg.str());
  }
}

}  // namespace

nlohmann::ordered_json CheckReport::to_json(bool with_wall_time) const {
  nlohmann::ordered_json j = {{"name", name},
                      {"pass", pass},
                      {"observed", observed},
                      {"threshold", threshold},
                      {"sample_size", sample_size},
                      {"seed", seed},
                      {"details", details}};
  if (with_wall_time) j["wall_time"] = wall_time;
  return j;
}

SamplerKind parse_sampler(std::string_view name) {
  if (name == "path") return SamplerKind::Path;
  if (name == "product") return SamplerKind::Product;
  throw ValidationError("unknown sampler '" + std::string(name) + "' (expected path or product)");
}

const char* sampler_name(SamplerKind kind) { return kind == SamplerKind::Path ? "path" : "product"; }

Sampler make_sampler(const MPHAlphaDist& d, SamplerKind kind) {
  if (kind == SamplerKind::Path) {
    return [d](random::RngStream& rng) { return mpha_sample_path(rng, d); };
  }
  return [d](random::RngStream& rng) { return mpha_sample_product(rng, d); };
}

Matrix draw_samples(const Sampler& sampler, Eigen::Index dim, std::size_t n, std::uint64_t seed,
                    std::uint64_t stream) {
  Matrix out(static_cast<Eigen::Index>(n), dim);
  for (std::size_t start = 0, chunk = 0; start < n; start += kChunkSize, ++chunk) {
    random::RngStream rng(seed, (stream << 32) | chunk);
    const std::size_t stop = std::min(n, start + kChunkSize);
    for (std::size_t i = start; i < stop; ++i) {
      out.row(static_cast<Eigen::Index>(i)) = sampler(rng).transpose();
    }
  }
  return out;
}

CheckReport check_laplace(const Sampler& sampler, Eigen::Index dim,
                          const std::function<double(const Vector&)>& analytic,
                          const std::vector<Vector>& thetas, std::size_t n, std::uint64_t seed,
                          std::uint64_t stream, std::string name) {
  Stopwatch clock;
  require_samples(n, 10000, "check_laplace");
  if (thetas.empty()) throw DomainError("check_laplace: empty theta grid");
  const Matrix draws = draw_samples(sampler, dim, n, seed, stream);

  CheckReport r;
  r.name = std::move(name);
  r.threshold = 4.0;
  r.sample_size = n;
  r.seed = seed;
  nlohmann::ordered_json points = nlohmann::ordered_json::array();
  for (const auto& theta : thetas) {
    if (theta.size() != dim) throw DomainError("check_laplace: theta has the wrong dimension");
    stats::MeanAccumulator acc;
    for (Eigen::Index i = 0; i < draws.rows(); ++i) acc.add(std::exp(-draws.row(i).dot(theta)));
    const double exact = analytic(theta);
    const double se = acc.standard_error();
    const double diff = std::abs(acc.mean() - exact);
    // A zero SE only happens for a degenerate transform; then any gap fails.
    const double z = se > 0.0 ? diff / se : (diff > 0.0 ? INFINITY : 0.0);
    r.observed = std::max(r.observed, z);
    points.push_back({{"theta", to_json(theta)}, {"empirical", acc.mean()}, {"analytic", exact},
                      {"standard_error", se}, {"z", z}});
  }
  r.details["points"] = std::move(points);
  r.settle();
  r.wall_time = clock.seconds();
  return r;
}

CheckReport check_laplace(const MPHAlphaDist& d, SamplerKind kind, const std::vector<Vector>& thetas,
                          std::size_t n, std::uint64_t seed, std::uint64_t stream) {
  auto r = check_laplace(
      make_sampler(d, kind), d.components(), [&](const Vector& th) { return mpha_laplace(d, th); },
      thetas, n, seed, stream, std::string("laplace_") + sampler_name(kind));
  r.details["sampler"] = sampler_name(kind);
  return r;
}

CheckReport check_sampler_agreement(const MPHAlphaDist& path_model, const MPHAlphaDist& product_model,
                                    std::size_t n, std::uint64_t seed, std::uint64_t stream) {
  Stopwatch clock;
  require_samples(n, 100, "check_sampler_agreement");
  if (path_model.components() != product_model.components()) {
    throw DomainError("check_sampler_agreement: models differ in dimension");
  }
  const Eigen::Index dim = path_model.components();
  const Matrix a = draw_samples(make_sampler(path_model, SamplerKind::Path), dim, n, seed, stream);
  // A separate stream family keeps the two samples independent.
  const Matrix b =
      draw_samples(make_sampler(product_model, SamplerKind::Product), dim, n, seed, stream + (1ULL << 16));

  CheckReport r;
  r.name = "sampler_agreement";
  r.threshold = 1.5 * stats::ks_band(n, n);
  r.sample_size = n;
  r.seed = seed;
  nlohmann::ordered_json per = nlohmann::ordered_json::array();
  for (Eigen::Index k = 0; k < dim; ++k) {
    const double ks = stats::ks_two_sample(column(a, k), column(b, k));
    per.push_back(ks);
    r.observed = std::max(r.observed, ks);
  }
  r.details["ks_per_component"] = std::move(per);
  r.settle();
  r.wall_time = clock.seconds();
  return r;
}

CheckReport check_sampler_agreement(const MPHAlphaDist& d, std::size_t n, std::uint64_t seed,
                                    std::uint64_t stream) {
  return check_sampler_agreement(d, d, n, seed, stream);
}

CheckReport check_projection(const MPHAlphaDist& d, const Vector& w, std::size_t n, std::uint64_t seed,
                             SamplerKind kind, std::uint64_t stream) {
  Stopwatch clock;
  require_samples(n, 100, "check_projection");
  const ProjectionResult proj = project(d, w);
  const Matrix draws = draw_samples(make_sampler(d, kind), d.components(), n, seed, stream);
  std::vector<double> values(n);
  std::size_t zeros = 0;
  for (std::size_t i = 0; i < n; ++i) {
    values[i] = draws.row(static_cast<Eigen::Index>(i)).dot(w);
    if (values[i] == 0.0) ++zeros;
  }

  const FracPHDist& law = proj.dist;
  const double sup = stats::ks_one_sample(
      values, [&](double x) { return fph_cdf(law, x); },
      [&](double x) { return x > 0.0 ? fph_cdf(law, x) : 0.0; });
  const double freq = static_cast<double>(zeros) / static_cast<double>(n);
  const double se = std::sqrt(proj.atom * (1.0 - proj.atom) / static_cast<double>(n));
  const double gap = std::abs(freq - proj.atom);
  const double atom_score = se > 0.0 ? gap / (3.0 * se) : (gap > 0.0 ? INFINITY : 0.0);

  CheckReport r;
  r.name = "projection";
  r.threshold = 1.0;
  r.observed = std::max(sup / 0.02, atom_score);
  r.sample_size = n;
  r.seed = seed;
  r.details = {{"w", to_json(w)},
               {"sampler", sampler_name(kind)},
               {"sup_distance", sup},
               {"sup_threshold", 0.02},
               {"atom", proj.atom},
               {"atom_frequency", freq},
               {"atom_standard_error", se},
               {"reduced_states", proj.kept_states.size()}};
  r.settle();
  r.wall_time = clock.seconds();
  return r;
}

CheckReport check_tail_index(const MPHAlphaDist& d, Eigen::Index component, std::size_t n,
                             std::uint64_t seed, const TailOptions& opts, std::uint64_t stream) {
  Stopwatch clock;
  if (component < 0 || component >= d.components()) throw DomainError("check_tail_index: bad component");
  double nu = 1.0;
  if (opts.nu) {
    if (opts.nu->size() != d.components()) throw DomainError("check_tail_index: nu has the wrong dimension");
    nu = (*opts.nu)(component);
    if (!(nu > 0.0)) throw DomainError("check_tail_index: nu must be positive");
  }
  const double expected = opts.expected_index.value_or(d.alpha() * nu);

  CheckReport r;
  r.name = "tail_index";
  r.threshold = opts.tolerance;
  r.sample_size = n;
  r.seed = seed;
  r.details = {{"component", component}, {"nu", nu}, {"expected_index", expected},
               {"sampler", sampler_name(opts.sampler)}};
  if (d.alpha() == 1.0) {
    r.details["skipped"] = "alpha = 1: light tail";
    r.sample_size = 0;
    r.settle();
    r.wall_time = clock.seconds();
    return r;
  }

  const Matrix draws = draw_samples(make_sampler(d, opts.sampler), d.components(), n, seed, stream);
  std::vector<double> values = column(draws, component);
  if (nu != 1.0) {
    for (auto& v : values) v = std::pow(v, 1.0 / nu);
  }
  const double slope = stats::log_survival_slope(std::move(values), opts.fraction);
  r.observed = std::abs(slope + expected);
  r.details["slope"] = slope;
  r.settle();
  r.wall_time = clock.seconds();
  return r;
}

CheckReport check_kolmogorov(const FracPHDist& d, const std::vector<double>& times,
                             const KolmogorovOptions& opts) {
  Stopwatch clock;
  if (times.empty()) throw DomainError("check_kolmogorov: empty time grid");
  const double horizon = *std::max_element(times.begin(), times.end());
  if (!(*std::min_element(times.begin(), times.end()) > 0.0)) {
    throw DomainError("check_kolmogorov: times must be positive");
  }
  const Matrix& t = d.base().T();
  const double alpha = d.alpha();
  const double h = horizon / static_cast<double>(opts.intervals);

  // One uniform grid on [0, horizon] serves every requested time; each time
  // is rounded to the nearest grid point.
  std::vector<Matrix> grid;
  grid.reserve(opts.intervals + 1);
  for (std::size_t j = 0; j <= opts.intervals; ++j) {
    grid.push_back(fph_transition_matrix(d, h * static_cast<double>(j)));
  }

  CheckReport r;
  r.name = "kolmogorov";
  r.threshold = opts.tolerance;
  r.sample_size = 0;
  r.seed = 0;
  nlohmann::ordered_json points = nlohmann::ordered_json::array();
  for (double time : times) {
    const auto index = static_cast<std::size_t>(std::llround(time / h));
    const double tj = h * static_cast<double>(index);
    Matrix derivative;
    if (alpha == 1.0) {
      if (index < 2) throw DomainError("check_kolmogorov: time below two grid steps");
      derivative = (3.0 * grid[index] - 4.0 * grid[index - 1] + grid[index - 2]) / (2.0 * h);
    } else {
      derivative = numerics::caputo_numeric(std::span<const Matrix>(grid.data(), index + 1), alpha, tj);
    }
    const Matrix left = t * grid[index];
    const Matrix right = grid[index] * t;
    const double err_left = (derivative - left).cwiseAbs().maxCoeff() / left.cwiseAbs().maxCoeff();
    const double err_right = (derivative - right).cwiseAbs().maxCoeff() / right.cwiseAbs().maxCoeff();
    r.observed = std::max({r.observed, err_left, err_right});
    points.push_back({{"t", tj}, {"relative_error_TP", err_left}, {"relative_error_PT", err_right}});
  }
  r.details = {{"alpha", alpha}, {"intervals", opts.intervals}, {"points", std::move(points)}};
  r.settle();
  r.wall_time = clock.seconds();
  return r;
}

Suite parse_suite(std::string_view name) {
  if (name == "fast") return Suite::Fast;
  if (name == "full") return Suite::Full;
  throw ValidationError("unknown suite '" + std::string(name) + "' (expected fast or full)");
}

namespace {

std::vector<Vector> default_thetas(Eigen::Index n) {
  std::vector<Vector> thetas;
  for (double c : {0.5, 1.0, 2.0}) thetas.push_back(Vector::Constant(n, c));
  thetas.push_back(Vector::LinSpaced(n, 1.0, static_cast<double>(n)));
  thetas.push_back(Vector::Unit(n, 0));
  thetas.push_back(Vector::Unit(n, n - 1) * 3.0);
  return thetas;
}

}  // namespace

std::vector<CheckReport> run_suite(const MPHAlphaDist& d, Suite suite, std::uint64_t seed) {
  const bool full = suite == Suite::Full;
  const std::size_t n_laplace = full ? 200000 : 20000;
  const std::size_t n_projection = full ? 100000 : 20000;
  const Eigen::Index n = d.components();

  std::vector<CheckReport> out;
  std::uint64_t stream = 1;
  const auto thetas = default_thetas(n);
  out.push_back(check_laplace(d, SamplerKind::Path, thetas, n_laplace, seed, stream++));
  out.push_back(check_laplace(d, SamplerKind::Product, thetas, n_laplace, seed, stream++));
  out.push_back(check_sampler_agreement(d, 10000, seed, stream++));

  std::vector<Vector> directions;
  for (Eigen::Index k = 0; k < n; ++k) directions.push_back(Vector::Unit(n, k));
  if (n > 1) directions.push_back(Vector::Ones(n));
  for (const auto& w : directions) {
    out.push_back(check_projection(d, w, n_projection, seed, SamplerKind::Path, stream++));
  }

  FracPHDist base(d.base(), d.alpha());
  out.push_back(check_kolmogorov(base, {0.5, 1.0, 2.0}));

  if (full) {
    for (Eigen::Index k = 0; k < n; ++k) {
      out.push_back(check_tail_index(d, k, 1000000, seed, {}, stream++));
    }
  }
  return out;
}

}  // namespace fracmph::verify
