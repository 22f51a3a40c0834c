#pragma once

#include "nullrec/drift_model.hpp"
#include "nullrec/limits.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nullrec {

enum class ExperimentKind { identity, rate, tail, rlt, risk };

std::string_view to_string(ExperimentKind k);
ExperimentKind experiment_kind_from_name(std::string_view name);

struct IdentityOptions {
  double tolerance = 1e-10;
};

struct RateOptions {
  std::size_t limit_draws = 2000;
  double ks_horizon_tolerance = 0.08;
  double ks_limit_tolerance = 0.10;
  double ks_calibration_tolerance = 0.05;
  double min_nonsingular_fraction = 0.9;
};

struct TailOptions {
  std::size_t target_cycles = 20000;  // completed plus censored
  std::size_t min_cycles = 5000;      // completed cycles required
  std::size_t lanes = 64;
  double cycle_cap = 5e4;  // durations beyond this are censored
  std::size_t hill_k = 0;  // 0: ceil(sqrt(n)) unless hill_fraction > 0
  double hill_fraction = 0.0;
  double alpha_tolerance = 0.07;
  double constant_tolerance = 0.25;  // relative
  double tail_level = 0.99;
};

struct RltOptions {
  std::size_t checkpoints = 4;  // horizon / 10^k, k = checkpoints-1..0
  double bias_tolerance = 0.15;  // relative
  double inconsistency_factor = 3.0;
};

struct RiskOptions {
  std::string loss = "truncated-quadratic";
  double loss_cap = 4.0;
  double radius = 2.0;
  std::size_t limit_draws = 100000;
  double stderr_multiplier = 3.0;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::identity;
  ModelSpec spec;
  ParamVector theta;
  std::vector<double> horizons;
  double dt = 1e-2;
  std::size_t replications = 10;
  std::uint64_t master_seed = 1;
  std::optional<Interval> window;
  std::string output;

  IdentityOptions identity;
  RateOptions rate;
  TailOptions tail;
  RltOptions rlt;
  RiskOptions risk;

  /// Throws ConfigError / ParameterDomainError on inconsistent settings.
  void validate() const;
};

/// One statistic. reference is the predicted value when there is one;
/// rows without a tolerance are informational and always pass.
struct ReportRow {
  double horizon = 0.0;
  int coord = -1;
  std::string stat_name;
  double value = 0.0;
  std::optional<double> reference;
  std::optional<double> tolerance;
  bool pass = true;

  bool operator==(const ReportRow&) const = default;
};

struct ExperimentReport {
  ExperimentKind kind = ExperimentKind::identity;
  std::vector<ReportRow> rows;
  std::vector<std::string> notes;
  bool passed = true;
  double wall_clock_seconds = 0.0;

  /// Appends a row and folds its pass flag into passed.
  void add(ReportRow row);
  const ReportRow* find(std::string_view stat, double horizon = -1.0, int coord = -2) const;

  /// Equality ignores the wall clock.
  bool operator==(const ExperimentReport& o) const {
    return kind == o.kind && rows == o.rows && notes == o.notes && passed == o.passed;
  }
};

ExperimentReport run_identity_suite(const ExperimentConfig& config);
ExperimentReport run_rate_experiment(const ExperimentConfig& config);
ExperimentReport run_tail_experiment(const ExperimentConfig& config);
ExperimentReport run_rlt_experiment(const ExperimentConfig& config);
ExperimentReport run_risk_experiment(const ExperimentConfig& config);

/// Dispatch on config.kind.
ExperimentReport run_experiment(const ExperimentConfig& config);

/// Tail statistics of a sample of possibly censored durations, shared by the
/// tail experiment and its synthetic checks.
struct TailSummary {
  std::size_t completed = 0;
  std::size_t censored = 0;
  std::size_t hill_k = 0;
  double alpha_hat = 0.0;
  double tail_time = 0.0;      // empirical quantile at the tail level
  double exceedance = 0.0;     // fraction of durations beyond tail_time
  double tail_constant = 0.0;  // tail_time^alpha * exceedance
};

TailSummary summarize_tail(const std::vector<double>& durations, const std::vector<bool>& censored,
                           double alpha, const TailOptions& opts);

}  // namespace nullrec
