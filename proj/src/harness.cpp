#include "nullrec/harness.hpp"

#include "nullrec/errors.hpp"
#include "nullrec/statistics.hpp"

#include <algorithm>
#include <cmath>

namespace nullrec {

std::string_view to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::identity:
      return "identity";
    case ExperimentKind::rate:
      return "rate";
    case ExperimentKind::tail:
      return "tail";
    case ExperimentKind::rlt:
      return "rlt";
    case ExperimentKind::risk:
      return "risk";
  }
  return "unknown";
}

ExperimentKind experiment_kind_from_name(std::string_view name) {
  for (auto k : {ExperimentKind::identity, ExperimentKind::rate, ExperimentKind::tail,
                 ExperimentKind::rlt, ExperimentKind::risk}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown experiment kind '" + std::string(name) +
                    "' (expected identity, rate, tail, rlt or risk)");
}

void ExperimentConfig::validate() const {
  require_parameter_space(spec, theta);
  if (replications < 1) throw ConfigError("replications must be at least 1");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be positive");
  if (horizons.empty()) throw ConfigError("horizons must be nonempty");
  for (std::size_t i = 0; i < horizons.size(); ++i) {
    if (!(horizons[i] >= dt) || !std::isfinite(horizons[i])) {
      throw ConfigError("each horizon must be finite and at least dt");
    }
    if (i > 0 && !(horizons[i] > horizons[i - 1])) {
      throw ConfigError("horizons must be strictly increasing");
    }
  }
  if (window) {
    if (!(window->hi > window->lo)) throw ConfigError("window has empty interior");
    if (!window->has_interior_point(spec.x0)) {
      throw ConfigError("window must contain x0 in its interior");
    }
  }
  switch (kind) {
    case ExperimentKind::rate:
      if (horizons.size() < 2) throw ConfigError("rate experiment needs at least two horizons");
      if (rate.limit_draws < 2) throw ConfigError("rate.limit_draws must be at least 2");
      break;
    case ExperimentKind::tail:
      if (tail.lanes < 1 || tail.target_cycles < 2) {
        throw ConfigError("tail experiment needs lanes >= 1 and target_cycles >= 2");
      }
      if (!(tail.cycle_cap > 0.0)) throw ConfigError("tail.cycle_cap must be positive");
      if (!(tail.tail_level > 0.0 && tail.tail_level < 1.0)) {
        throw ConfigError("tail.tail_level must lie in (0, 1)");
      }
      break;
    case ExperimentKind::rlt:
      if (spec.basis.size() < 1) throw ConfigError("rlt experiment needs a secondary basis (m >= 1)");
      if (rlt.checkpoints < 1) throw ConfigError("rlt.checkpoints must be at least 1");
      break;
    case ExperimentKind::risk:
      Loss::from_name(risk.loss, risk.loss_cap);
      if (!(risk.radius > 0.0)) throw ConfigError("risk.radius must be positive");
      if (risk.limit_draws < 2) throw ConfigError("risk.limit_draws must be at least 2");
      break;
    case ExperimentKind::identity:
      break;
  }
}

void ExperimentReport::add(ReportRow row) {
  passed = passed && row.pass;
  rows.push_back(std::move(row));
}

const ReportRow* ExperimentReport::find(std::string_view stat, double horizon, int coord) const {
  for (const auto& r : rows) {
    if (r.stat_name != stat) continue;
    if (horizon >= 0.0 && r.horizon != horizon) continue;
    if (coord != -2 && r.coord != coord) continue;
    return &r;
  }
  return nullptr;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  switch (config.kind) {
    case ExperimentKind::identity:
      return run_identity_suite(config);
    case ExperimentKind::rate:
      return run_rate_experiment(config);
    case ExperimentKind::tail:
      return run_tail_experiment(config);
    case ExperimentKind::rlt:
      return run_rlt_experiment(config);
    case ExperimentKind::risk:
      return run_risk_experiment(config);
  }
  throw ConfigError("unknown experiment kind");
}

TailSummary summarize_tail(const std::vector<double>& durations, const std::vector<bool>& censored,
                           double alpha, const TailOptions& opts) {
  if (durations.size() != censored.size()) throw DimensionMismatch("censoring flags differ in length");
  TailSummary s;
  const std::size_t n = durations.size();
  s.censored = static_cast<std::size_t>(std::count(censored.begin(), censored.end(), true));
  s.completed = n - s.censored;
  if (n < 2) throw DegenerateError("tail summary needs at least two durations");
  if (opts.hill_k > 0) {
    s.hill_k = opts.hill_k;
  } else if (opts.hill_fraction > 0.0) {
    s.hill_k = static_cast<std::size_t>(std::ceil(opts.hill_fraction * static_cast<double>(n)));
  } else {
    s.hill_k = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
  }
  s.hill_k = std::min(s.hill_k, n - 1);
  s.alpha_hat = censored_hill_estimator(durations, censored, s.hill_k);
  s.tail_time = quantile(durations, opts.tail_level);
  const auto beyond = std::count_if(durations.begin(), durations.end(),
                                    [&](double d) { return d > s.tail_time; });
  s.exceedance = static_cast<double>(beyond) / static_cast<double>(n);
  s.tail_constant = std::pow(s.tail_time, alpha) * s.exceedance;
  return s;
}

}  // namespace nullrec
