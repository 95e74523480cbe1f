#pragma once

// Small sample statistics used by the verification harness.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace fracmph::stats {

/// Running mean and variance (Welford). merge() combines partial results in
/// a fixed order so chunked runs reduce deterministically.
class MeanAccumulator {
 public:
  void add(double x) noexcept;
  void merge(const MeanAccumulator& other) noexcept;

  std::size_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  /// Unbiased sample variance; 0 for fewer than two observations.
  double variance() const noexcept;
  /// Standard error of the mean.
  double standard_error() const noexcept;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|. Ties are
/// handled by stepping over every copy of a value before comparing.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Asymptotic KS band c(level) sqrt((n + m) / (n m)); c = 1.358 at 95%.
double ks_band(std::size_t n, std::size_t m, double c = 1.358);

/// sup_x |F_n(x) - F(x)| for a distribution function F that may jump at 0.
/// `cdf_left(x)` must return F(x-) and `cdf(x)` F(x); for continuous parts
/// they coincide.
double ks_one_sample(std::vector<double> sample, const std::function<double(double)>& cdf,
                     const std::function<double(double)>& cdf_left);

/// Least-squares slope of log S_n(x) against log x over the largest
/// `fraction` of the sample, with S_n(x_(i)) = (n - i) / n for the i-th
/// order statistic (0-based). Nonpositive observations are ignored.
double log_survival_slope(std::vector<double> sample, double fraction = 0.1);

}  // namespace fracmph::stats
