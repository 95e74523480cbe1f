#include <algorithm>
#include <cmath>

#include "fracmph/errors.hpp"
#include "fracmph/stats.hpp"

namespace fracmph::stats {

void MeanAccumulator::add(double x) noexcept {
  ++n_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (x - mean_);
}

void MeanAccumulator::merge(const MeanAccumulator& other) noexcept {
  if (other.n_ == 0) return;
  if (n_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(n_);
  const double nb = static_cast<double>(other.n_);
  const double delta = other.mean_ - mean_;
  const double total = na + nb;
  mean_ += delta * nb / total;
  m2_ += other.m2_ + delta * delta * na * nb / total;
  n_ += other.n_;
}

double MeanAccumulator::variance() const noexcept {
  return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
}

double MeanAccumulator::standard_error() const noexcept {
  return n_ > 0 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw DomainError("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double ks_band(std::size_t n, std::size_t m, double c) {
  const double dn = static_cast<double>(n);
  const double dm = static_cast<double>(m);
  return c * std::sqrt((dn + dm) / (dn * dm));
}

double ks_one_sample(std::vector<double> sample, const std::function<double(double)>& cdf,
                     const std::function<double(double)>& cdf_left) {
  if (sample.empty()) throw DomainError("ks_one_sample: empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  std::size_t i = 0;
  while (i < sample.size()) {
    const double x = sample[i];
    const double below = static_cast<double>(i) / n;
    while (i < sample.size() && sample[i] == x) ++i;
    const double at = static_cast<double>(i) / n;
    d = std::max({d, std::abs(cdf_left(x) - below), std::abs(cdf(x) - at)});
  }
  return d;
}

double log_survival_slope(std::vector<double> sample, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw DomainError("log_survival_slope: fraction must lie in (0,1]");
  std::sort(sample.begin(), sample.end());
  const std::size_t n = sample.size();
  const auto tail = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n)));
  if (tail < 3) throw DomainError("log_survival_slope: sample too small");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t used = 0;
  for (std::size_t i = n - tail; i < n; ++i) {
    if (!(sample[i] > 0.0)) continue;
    const double lx = std::log(sample[i]);
    const double ly = std::log(static_cast<double>(n - i) / static_cast<double>(n));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++used;
  }
  if (used < 3) throw DomainError("log_survival_slope: too few positive observations in the tail");
  const double m = static_cast<double>(used);
  const double denom = sxx - sx * sx / m;
  if (!(denom > 0.0)) throw DomainError("log_survival_slope: degenerate tail (all values equal)");
  return (sxy - sx * sy / m) / denom;
}

}  // namespace fracmph::stats
