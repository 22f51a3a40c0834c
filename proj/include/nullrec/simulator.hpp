#pragma once

#include "nullrec/drift_model.hpp"
#include "nullrec/errors.hpp"
#include "nullrec/rng.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nullrec {

struct DiffusionPath {
  double dt = 0.0;
  double horizon = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::vector<double> values;
  std::string spec_ref;
  std::string theta_ref;

  double time(std::size_t k) const { return static_cast<double>(k) * dt; }
};

struct SufficientStats {
  Eigen::VectorXd y;
  Eigen::MatrixXd j;
  double t = 0.0;
  std::optional<Interval> window;

  std::size_t dim() const { return static_cast<std::size_t>(y.size()); }
};

struct LifeCycleRecord {
  std::vector<double> r_times;
  std::vector<double> durations;
  double threshold = 1.0;
};

/// Number of Euler steps for a horizon: floor(horizon / dt), tolerant to the
/// rounding of decimal step sizes.
std::size_t step_count(double horizon, double dt);

/// Euler-Maruyama update x + b(x) dt + sigma sqrt(dt) z with the drift
/// evaluated from precomputed coefficients.
class EulerScheme {
 public:
  EulerScheme(const ModelSpec& spec, const ParamVector& theta, double dt);

  double drift(double x) const;
  double step(double x, double z) const { return x + drift(x) * dt_ + noise_scale_ * z; }
  double dt() const { return dt_; }

 private:
  const ModelSpec* spec_;
  ParamVector theta_;
  double dt_;
  double noise_scale_;
  bool zero_drift_ = false;
  bool principal_only_ = false;
  mutable std::vector<double> psi_;
};

/// Full path on the grid k*dt, k = 0..floor(horizon/dt). Normals come from
/// RandomStream(seed, stream). horizon = 0 returns [x0].
DiffusionPath simulate_path(const ModelSpec& spec, const ParamVector& theta, double horizon,
                            double dt, std::uint64_t seed, std::uint64_t stream = 0);

/// Streaming Euler driver: calls observer(k, x_k, x_{k+1}) for k = 0..steps-1
/// without storing the path. Returns the terminal state.
template <typename Observer>
double run_euler(const ModelSpec& spec, const ParamVector& theta, double dt, std::size_t steps,
                 RandomStream& rng, Observer&& observer);

/// Running sums y = sum psi(x_k)(x_{k+1} - x_k)/sigma^2 and
/// j = sum psi psi^T(x_k) dt/sigma^2, with psi replaced by psi 1_A under a window.
class StatsAccumulator {
 public:
  StatsAccumulator(const ModelSpec& spec, std::optional<Interval> window = std::nullopt);

  void add(double x, double dx, double dt);
  SufficientStats stats() const;
  const std::optional<Interval>& window() const { return window_; }

 private:
  const ModelSpec* spec_;
  std::optional<Interval> window_;
  int dim_;
  double inv_s2_;
  std::vector<double> psi_;
  std::vector<double> y_;
  std::vector<double> j_;  // packed upper triangle
  double t_ = 0.0;
};

SufficientStats accumulate_stats(const ModelSpec& spec, const DiffusionPath& path,
                                 std::optional<Interval> window = std::nullopt);

/// y - j theta. Throws DimensionMismatch when sizes disagree.
Eigen::VectorXd score_at(const SufficientStats& stats, const Eigen::VectorXd& theta);
Eigen::VectorXd score_at(const SufficientStats& stats, const ParamVector& theta);

/// Alternating search for up-crossings of the threshold followed by
/// down-crossings of 0; each down-crossing time is one R_n.
class LifeCycleDetector {
 public:
  explicit LifeCycleDetector(double threshold) : threshold_(threshold) {}

  /// Feed the state at time t. Returns true when a new R_n was recorded.
  bool observe(double t, double x);
  const LifeCycleRecord& record() const { return record_; }
  LifeCycleRecord& record() { return record_; }
  bool above_threshold_seen() const { return armed_; }

 private:
  double threshold_;
  bool armed_ = false;
  LifeCycleRecord record_{{}, {}, threshold_};
};

LifeCycleRecord detect_life_cycles(const ModelSpec& spec, const ParamVector& theta,
                                   const DiffusionPath& path);

// ---------------------------------------------------------------------------

template <typename Observer>
double run_euler(const ModelSpec& spec, const ParamVector& theta, double dt, std::size_t steps,
                 RandomStream& rng, Observer&& observer) {
  const EulerScheme scheme(spec, theta, dt);
  double x = spec.x0;
  for (std::size_t k = 0; k < steps; ++k) {
    const double next = scheme.step(x, rng.normal());
    if (!std::isfinite(next)) {
      throw SimulationDiverged("non-finite state at step " + std::to_string(k + 1));
    }
    observer(k, x, next);
    x = next;
  }
  return x;
}

}  // namespace nullrec
