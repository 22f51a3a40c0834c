#include "nullrec/statistics.hpp"

#include "nullrec/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace nullrec {

Summary summarize(std::span<const double> x) {
  Summary s;
  s.n = x.size();
  if (x.empty()) return s;
  // Welford; stable for the heavy-tailed samples produced by the limit laws.
  double mean = 0.0;
  double m2 = 0.0;
  std::size_t k = 0;
  for (double v : x) {
    ++k;
    const double d = v - mean;
    mean += d / static_cast<double>(k);
    m2 += d * (v - mean);
  }
  s.mean = mean;
  if (s.n > 1) {
    s.sd = std::sqrt(m2 / static_cast<double>(s.n - 1));
    s.stderr_ = s.sd / std::sqrt(static_cast<double>(s.n));
  }
  return s;
}

double ks_statistic(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw PreconditionError("ks_statistic: empty sample");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  return d;
}

double hill_estimator(std::span<const double> sample, std::size_t k) {
  const std::size_t n = sample.size();
  if (k < 1 || k >= n) {
    throw PreconditionError("hill_estimator: k = " + std::to_string(k) + " outside [1, " +
                            std::to_string(n) + ")");
  }
  for (double v : sample) {
    if (!(v > 0.0)) throw PreconditionError("hill_estimator: sample must be positive");
  }
  std::vector<double> x(sample.begin(), sample.end());
  std::nth_element(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(k), x.end(),
                   std::greater<>());
  const double threshold = x[k];
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += std::log(x[i] / threshold);
  if (!(sum > 0.0)) throw DegenerateError("hill_estimator: top order statistics are all equal");
  return static_cast<double>(k) / sum;
}

double censored_hill_estimator(std::span<const double> values, const std::vector<bool>& censored,
                               std::size_t k) {
  const std::size_t n = values.size();
  if (censored.size() != n) throw DimensionMismatch("censored_hill_estimator: flag count differs");
  if (k < 1 || k >= n) {
    throw PreconditionError("censored_hill_estimator: k = " + std::to_string(k) +
                            " outside [1, " + std::to_string(n) + ")");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (double v : values) {
    if (!(v > 0.0)) throw PreconditionError("censored_hill_estimator: values must be positive");
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] > values[b] || (values[a] == values[b] && a < b);
  });
  const double threshold = values[order[k]];
  double sum = 0.0;
  std::size_t events = 0;
  for (std::size_t i = 0; i < k; ++i) {
    sum += std::log(values[order[i]] / threshold);
    if (!censored[order[i]]) ++events;
  }
  if (!(sum > 0.0)) {
    throw DegenerateError("censored_hill_estimator: top order statistics are all equal");
  }
  return static_cast<double>(events) / sum;
}

double quantile(std::vector<double> x, double p) {
  if (x.empty()) throw PreconditionError("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw PreconditionError("quantile level outside [0, 1]");
  std::sort(x.begin(), x.end());
  const double h = p * static_cast<double>(x.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, x.size() - 1);
  return x[lo] + (h - static_cast<double>(lo)) * (x[hi] - x[lo]);
}

double median(std::vector<double> x) { return quantile(std::move(x), 0.5); }

double interquartile_range(std::vector<double> x) {
  return quantile(x, 0.75) - quantile(std::move(x), 0.25);
}

}  // namespace nullrec
