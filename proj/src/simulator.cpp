#include "nullrec/simulator.hpp"

#include <cmath>

namespace nullrec {

std::size_t step_count(double horizon, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw PreconditionError("dt must be positive and finite");
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) {
    throw PreconditionError("horizon must be nonnegative and finite");
  }
  const double ratio = horizon / dt;
  const double nearest = std::round(ratio);
  // 50 / 0.01 is 5000.000000000001 in binary; snap such cases to the integer.
  if (std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, nearest)) {
    return static_cast<std::size_t>(nearest);
  }
  return static_cast<std::size_t>(std::floor(ratio));
}

EulerScheme::EulerScheme(const ModelSpec& spec, const ParamVector& theta, double dt)
    : spec_(&spec), theta_(theta), dt_(dt), noise_scale_(spec.sigma * std::sqrt(dt)),
      psi_(spec.dim()) {
  bool secondary_zero = true;
  for (double t : theta.theta2) secondary_zero = secondary_zero && t == 0.0;
  principal_only_ = secondary_zero;
  zero_drift_ = secondary_zero && theta.theta1 == 0.0;
}

double EulerScheme::drift(double x) const {
  if (zero_drift_) return 0.0;
  if (principal_only_) return theta_.theta1 * principal_function(x);
  spec_->basis.eval_psi(x, psi_);
  double b = theta_.theta1 * psi_[0];
  for (std::size_t nu = 0; nu < theta_.theta2.size(); ++nu) b += theta_.theta2[nu] * psi_[nu + 1];
  return b;
}

DiffusionPath simulate_path(const ModelSpec& spec, const ParamVector& theta, double horizon,
                            double dt, std::uint64_t seed, std::uint64_t stream) {
  require_parameter_space(spec, theta);
  const std::size_t steps = step_count(horizon, dt);
  if (horizon > 0.0 && dt > horizon) {
    throw PreconditionError("dt must not exceed the horizon");
  }
  DiffusionPath path;
  path.dt = dt;
  path.horizon = horizon;
  path.seed = seed;
  path.stream = stream;
  path.spec_ref = describe(spec);
  path.theta_ref = describe(theta);
  path.values.reserve(steps + 1);
  path.values.push_back(spec.x0);
  RandomStream rng(seed, stream);
  run_euler(spec, theta, dt, steps, rng,
            [&](std::size_t, double, double next) { path.values.push_back(next); });
  return path;
}

StatsAccumulator::StatsAccumulator(const ModelSpec& spec, std::optional<Interval> window)
    : spec_(&spec), window_(window), dim_(static_cast<int>(spec.dim())),
      inv_s2_(1.0 / (spec.sigma * spec.sigma)), psi_(spec.dim()), y_(spec.dim(), 0.0),
      j_(spec.dim() * (spec.dim() + 1) / 2, 0.0) {}

void StatsAccumulator::add(double x, double dx, double dt) {
  t_ += dt;
  if (window_ && !window_->contains(x)) return;
  spec_->basis.eval_psi(x, psi_);
  int idx = 0;
  for (int i = 0; i < dim_; ++i) {
    const double pi = psi_[static_cast<std::size_t>(i)];
    y_[static_cast<std::size_t>(i)] += pi * dx * inv_s2_;
    for (int l = i; l < dim_; ++l) {
      j_[static_cast<std::size_t>(idx++)] += pi * psi_[static_cast<std::size_t>(l)] * dt * inv_s2_;
    }
  }
}

SufficientStats StatsAccumulator::stats() const {
  SufficientStats s;
  s.y = Eigen::Map<const Eigen::VectorXd>(y_.data(), dim_);
  s.j.resize(dim_, dim_);
  int idx = 0;
  for (int i = 0; i < dim_; ++i) {
    for (int l = i; l < dim_; ++l) {
      s.j(i, l) = j_[static_cast<std::size_t>(idx)];
      s.j(l, i) = j_[static_cast<std::size_t>(idx)];
      ++idx;
    }
  }
  s.t = t_;
  s.window = window_;
  return s;
}

SufficientStats accumulate_stats(const ModelSpec& spec, const DiffusionPath& path,
                                 std::optional<Interval> window) {
  if (path.values.empty()) throw PreconditionError("accumulate_stats: empty path");
  StatsAccumulator acc(spec, window);
  for (std::size_t k = 0; k + 1 < path.values.size(); ++k) {
    acc.add(path.values[k], path.values[k + 1] - path.values[k], path.dt);
  }
  return acc.stats();
}

Eigen::VectorXd score_at(const SufficientStats& stats, const Eigen::VectorXd& theta) {
  if (theta.size() != stats.y.size() || stats.j.rows() != stats.y.size() ||
      stats.j.cols() != stats.y.size()) {
    throw DimensionMismatch("score_at: parameter has " + std::to_string(theta.size()) +
                            " entries, statistics have " + std::to_string(stats.y.size()));
  }
  return stats.y - stats.j * theta;
}

Eigen::VectorXd score_at(const SufficientStats& stats, const ParamVector& theta) {
  return score_at(stats, theta.to_vector());
}

bool LifeCycleDetector::observe(double t, double x) {
  if (!armed_) {
    if (x > threshold_) armed_ = true;
    return false;
  }
  if (x < 0.0) {
    armed_ = false;
    if (!record_.r_times.empty()) record_.durations.push_back(t - record_.r_times.back());
    record_.r_times.push_back(t);
    return true;
  }
  return false;
}

LifeCycleRecord detect_life_cycles(const ModelSpec& spec, const ParamVector& theta,
                                   const DiffusionPath& path) {
  const double threshold = scale_inverse(spec, theta, 1.0);
  LifeCycleDetector detector(threshold);
  for (std::size_t k = 0; k < path.values.size(); ++k) detector.observe(path.time(k), path.values[k]);
  return detector.record();
}

}  // namespace nullrec
