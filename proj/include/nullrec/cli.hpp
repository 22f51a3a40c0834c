#pragma once

#include "nullrec/harness.hpp"
#include "nullrec/serialization.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace nullrec::cli {

enum class Subcommand { constants, simulate, estimate, limits, experiment, check };

std::string_view to_string(Subcommand s);

struct SimulateOptions {
  double horizon = 1.0;
  double dt = 1e-2;
  std::string format = "csv";  // csv: (t, x) rows; json: sufficient statistics
};

struct EstimateOptions {
  std::string stats_path;
  std::optional<ParamVector> theta;  // loglik_at evaluated against this point
};

struct LimitsOptions {
  double alpha = 0.5;
  int dim = 1;
  std::string cov_path;  // empty: identity
  std::size_t n = 1000;
  bool risk = false;
  std::string loss = "truncated-quadratic";
  double loss_cap = 4.0;
};

struct CliConfig {
  Subcommand subcommand = Subcommand::check;
  ModelSpec spec;
  ParamVector theta;
  std::uint64_t seed = 1;
  double n = 1.0;  // norming index for constants
  std::optional<Interval> window;
  std::string output;  // empty: stdout (experiment: report stem)
  int verbosity = 0;

  SimulateOptions simulate;
  EstimateOptions estimate;
  LimitsOptions limits;
  ExperimentConfig experiment;

  /// The merged option object (config file overlaid with flags) the typed
  /// fields were built from.
  Json merged;
};

/// Usage problems: unknown or missing flags, bad values, parameters outside
/// the admissible set. The message names the offending flag.
class UsageError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Parses argv (argv[0] is the program name). Throws UsageError; --help is
/// reported through the return value's help text.
struct ParseOutcome {
  std::optional<CliConfig> config;
  std::string help;  // nonempty when --help was requested
};
ParseOutcome parse_config(const std::vector<std::string>& args);

/// Runs the subcommand. Returns 0 on success, 1 when an experiment misses a
/// tolerance. Module errors propagate as exceptions.
int dispatch(const CliConfig& config, std::ostream& out, std::ostream& err);

/// parse + dispatch with error rendering: 2 for usage and runtime errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nullrec::cli
