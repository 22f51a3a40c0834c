#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

namespace nullrec {

struct Summary {
  double mean = 0.0;
  double sd = 0.0;
  double stderr_ = 0.0;
  std::size_t n = 0;
};

Summary summarize(std::span<const double> x);

/// Two-sample Kolmogorov-Smirnov distance sup |F_a - F_b|. Throws
/// PreconditionError when either sample is empty.
double ks_statistic(std::span<const double> a, std::span<const double> b);

/// One-sample distance to a continuous CDF.
template <typename Cdf>
double ks_statistic_cdf(std::vector<double> sample, Cdf&& cdf);

/// Tail index k / sum_{i<=k} log(X_(n-i+1) / X_(n-k)). Throws
/// PreconditionError for nonpositive data or k outside [1, n), DegenerateError
/// when the top k order statistics all equal X_(n-k).
double hill_estimator(std::span<const double> sample, std::size_t k);

/// Hill estimator under type-I censoring: values are min(X, cap), censored
/// marks those that reached the cap. Pareto maximum likelihood above the
/// (k+1)-th largest value: (uncensored count in the top k) / sum log(v_i / v_(k+1)).
double censored_hill_estimator(std::span<const double> values, const std::vector<bool>& censored,
                               std::size_t k);

/// Linear-interpolation quantile (type 7). Throws on empty input.
double quantile(std::vector<double> x, double p);
double median(std::vector<double> x);
double interquartile_range(std::vector<double> x);

// ---------------------------------------------------------------------------

template <typename Cdf>
double ks_statistic_cdf(std::vector<double> sample, Cdf&& cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

}  // namespace nullrec
