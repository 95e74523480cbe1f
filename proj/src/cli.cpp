#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "fracmph/cli.hpp"
#include "fracmph/errors.hpp"
#include "fracmph/model_io.hpp"
#include "fracmph/verify.hpp"

namespace fracmph::cli {

namespace {

constexpr double kDensityFloor = 1e-4;

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Opens --out: "-" is the caller's stream, anything else a file.
class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) {
    if (path == "-") {
      stream_ = &fallback;
      return;
    }
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw IoError("cannot open output file '" + path + "'");
    stream_ = file_.get();
  }
  std::ostream& operator*() { return *stream_; }
  void finish() {
    stream_->flush();
    if (!*stream_) throw IoError("write to output failed");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_ = nullptr;
};

void write_header(std::ostream& os, const std::vector<std::string>& names) {
  for (std::size_t i = 0; i < names.size(); ++i) os << (i ? "," : "") << names[i];
  os << '\n';
}

std::vector<std::string> component_names(const LoadedModel& m) {
  if (m.univariate()) return {"x"};
  std::vector<std::string> names;
  for (Eigen::Index k = 0; k < m.dist.components(); ++k) names.push_back("y" + std::to_string(k + 1));
  return names;
}

Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

struct Options {
  std::string model;
  std::string out = "-";
  std::size_t n = 0;
  std::uint64_t seed = 1;
  std::string sampler = "path";
  std::vector<std::string> grid;
  std::vector<std::string> theta;
  std::string w;
  std::string suite = "fast";
};

int cmd_sample(const Options& o, std::ostream& out) {
  const LoadedModel m = load_model(o.model);
  const auto kind = verify::parse_sampler(o.sampler);
  Output dest(o.out, out);
  write_header(*dest, component_names(m));
  const auto sampler = verify::make_sampler(m.dist, kind);
  const Matrix draws = verify::draw_samples(sampler, m.dist.components(), o.n, o.seed, 0);
  for (Eigen::Index i = 0; i < draws.rows(); ++i) {
    Vector y = draws.row(i).transpose();
    if (m.nu) y = apply_power(y, *m.nu);
    for (Eigen::Index k = 0; k < y.size(); ++k) *dest << (k ? "," : "") << fmt(y(k));
    *dest << '\n';
  }
  dest.finish();
  return kOk;
}

int cmd_density(const Options& o, std::ostream& out) {
  const LoadedModel m = load_model(o.model);
  const double floor = m.dist.alpha() < 1.0 ? kDensityFloor : 0.0;
  const Eigen::Index n = m.dist.components();
  if (o.grid.size() != static_cast<std::size_t>(n)) {
    throw ValidationError("density needs one --grid min:max:steps per component (" + std::to_string(n) +
                          "), got " + std::to_string(o.grid.size()));
  }
  if (n > 2) throw ValidationError("density grids are limited to one or two components");

  if (n == 1) {
    const auto xs = parse_grid(o.grid[0], floor);
    JointDensity f = power_density(m.dist, m.nu ? *m.nu : PowerVector(Vector::Ones(1)));
    Output dest(o.out, out);
    write_header(*dest, {"x", "f"});
    for (double x : xs) *dest << fmt(x) << ',' << fmt(f(std::span<const double>(&x, 1))) << '\n';
    dest.finish();
    return kOk;
  }

  const auto xs = parse_grid(o.grid[0], floor);
  const auto ys = parse_grid(o.grid[1], floor);
  const bool tagged = m.bivariate && !m.nu;
  JointDensity f;
  if (!tagged) f = power_density(m.dist, m.nu ? *m.nu : PowerVector(Vector::Ones(2)));
  Output dest(o.out, out);
  write_header(*dest, tagged ? std::vector<std::string>{"x", "y", "f", "region"}
                             : std::vector<std::string>{"x", "y", "f"});
  for (double x : xs) {
    for (double y : ys) {
      if (tagged) {
        const RegionDensity rd = bivariate_density(*m.bivariate, x, y);
        *dest << fmt(x) << ',' << fmt(y) << ',' << fmt(rd.value) << ',' << region_name(rd.region) << '\n';
      } else {
        const double pt[2] = {x, y};
        *dest << fmt(x) << ',' << fmt(y) << ',' << fmt(f(pt)) << '\n';
      }
    }
  }
  dest.finish();
  return kOk;
}

int cmd_laplace(const Options& o, std::ostream& out) {
  const LoadedModel m = load_model(o.model);
  if (m.nu) throw ValidationError("the Laplace transform of a power-transformed model has no closed form");
  if (o.theta.empty()) throw ValidationError("laplace needs at least one --theta");
  const Eigen::Index n = m.dist.components();
  std::vector<std::string> header;
  for (Eigen::Index k = 0; k < n; ++k) header.push_back("theta" + std::to_string(k + 1));
  header.insert(header.end(), {"laplace", "continuous"});

  std::vector<Vector> points;
  for (const auto& text : o.theta) {
    Vector theta = to_vector(parse_list(text));
    if (theta.size() != n) {
      throw ValidationError("--theta '" + text + "' has " + std::to_string(theta.size()) +
                            " entries, the model has " + std::to_string(n) + " components");
    }
    points.push_back(std::move(theta));
  }
  const double atom = m.dist.base().atom();
  Output dest(o.out, out);
  write_header(*dest, header);
  for (const auto& theta : points) {
    const double value = mpha_laplace(m.dist, theta);
    for (Eigen::Index k = 0; k < n; ++k) *dest << fmt(theta(k)) << ',';
    *dest << fmt(value) << ',' << fmt(value - atom) << '\n';
  }
  dest.finish();
  return kOk;
}

int cmd_project(const Options& o, std::ostream& out) {
  const LoadedModel m = load_model(o.model);
  if (o.w.empty()) throw ValidationError("project needs --w");
  const Vector w = to_vector(parse_list(o.w));
  if (w.size() != m.dist.components()) {
    throw ValidationError("--w has " + std::to_string(w.size()) + " entries, the model has " +
                          std::to_string(m.dist.components()) + " components");
  }
  const ProjectionResult proj = project(m.dist, w);
  Output dest(o.out, out);
  *dest << fph_document(proj.dist).dump(2) << '\n';
  dest.finish();
  return kOk;
}

int cmd_verify(const Options& o, std::ostream& out) {
  const LoadedModel m = load_model(o.model);
  const auto suite = verify::parse_suite(o.suite);
  Output dest(o.out, out);
  bool all = true;
  for (const auto& report : verify::run_suite(m.dist, suite, o.seed)) {
    *dest << report.to_json().dump() << '\n';
    dest.finish();
    all = all && report.pass;
  }
  return all ? kOk : kCheckFailed;
}

}  // namespace

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> values;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    std::string token = text.substr(start, comma - start);
    const auto first = token.find_first_not_of(" \t");
    const auto last = token.find_last_not_of(" \t");
    token = first == std::string::npos ? "" : token.substr(first, last - first + 1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (token.empty() || ec != std::errc() || ptr != token.data() + token.size()) {
      throw ValidationError("'" + text + "' is not a comma-separated list of numbers");
    }
    values.push_back(v);
    start = comma + 1;
  }
  return values;
}

std::vector<double> parse_grid(const std::string& spec, double floor) {
  std::string s = spec;
  for (char& c : s) {
    if (c == ':') c = ',';
  }
  const auto parts = parse_list(s);
  if (parts.size() != 3) throw ValidationError("grid '" + spec + "' must be min:max:steps");
  const double lo = parts[0], hi = parts[1];
  const double steps = parts[2];
  if (!(steps >= 1.0) || steps != std::floor(steps)) {
    throw ValidationError("grid '" + spec + "': steps must be a positive integer");
  }
  if (!(hi >= lo) || lo < 0.0) throw ValidationError("grid '" + spec + "': need 0 <= min <= max");
  const auto count = static_cast<std::size_t>(steps);
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) {
    grid[i] = count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    if (floor > 0.0 && grid[i] < floor) grid[i] = floor;
  }
  return grid;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multivariate fractional phase-type distributions"};
  app.require_subcommand(1);
  Options o;

  auto add_model = [&](CLI::App* sub) {
    sub->add_option("--model", o.model, "Model file (JSON)")->required();
    sub->add_option("--out", o.out, "Output path, '-' for standard output")->capture_default_str();
  };
  auto* sample = app.add_subcommand("sample", "Draw samples as CSV");
  add_model(sample);
  sample->add_option("--n", o.n, "Number of draws")->required();
  sample->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  sample->add_option("--sampler", o.sampler, "path or product")->capture_default_str();

  auto* density = app.add_subcommand("density", "Evaluate the density on a grid as CSV");
  add_model(density);
  density->add_option("--grid", o.grid, "min:max:steps, once per component")->required();

  auto* laplace = app.add_subcommand("laplace", "Evaluate the joint Laplace transform");
  add_model(laplace);
  laplace->add_option("--theta", o.theta, "Comma-separated theta, repeatable")->required();

  auto* proj = app.add_subcommand("project", "Law of <Y, w> as a PH_alpha model file");
  add_model(proj);
  proj->add_option("--w", o.w, "Comma-separated direction")->required();

  auto* ver = app.add_subcommand("verify", "Run the verification suite (NDJSON reports)");
  add_model(ver);
  ver->add_option("--suite", o.suite, "fast or full")->capture_default_str();
  ver->add_option("--seed", o.seed, "Random seed")->capture_default_str();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (*sample) return cmd_sample(o, out);
    if (*density) return cmd_density(o, out);
    if (*laplace) return cmd_laplace(o, out);
    if (*proj) return cmd_project(o, out);
    return cmd_verify(o, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const ValidationError& e) {
    err << "invalid input: " << e.first();
    if (e.violations().size() > 1) err << " (and " << e.violations().size() - 1 << " more)";
    err << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  }
}

}  // namespace fracmph::cli
