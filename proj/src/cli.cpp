#include "nullrec/cli.hpp"

#include "nullrec/errors.hpp"
#include "nullrec/estimators.hpp"
#include "nullrec/limits.hpp"
#include "nullrec/statistics.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace nullrec::cli {
namespace {

enum class FlagType { number, integer, text, number_list, interval, boolean };

struct Flag {
  const char* name;  // without leading dashes
  const char* flat_key;
  const char* nested_pointer;  // location in an experiment config
  FlagType type;
  const char* help;
};

// Flags shared by the model-based subcommands.
const std::vector<Flag> kModelFlags = {
    {"sigma", "sigma", "/model/sigma", FlagType::number, "diffusion coefficient"},
    {"basis", "basis", "/model/basis", FlagType::text, "none, sinc or fourier-<order>"},
    {"x0", "x0", "/model/x0", FlagType::number, "starting point"},
    {"theta1", "theta1", "/theta/theta1", FlagType::number, "coefficient of x/(1+x^2)"},
    {"theta2", "theta2", "/theta/theta2", FlagType::number_list, "comma-separated secondary coefficients"},
};

std::vector<Flag> flags_for(Subcommand s) {
  std::vector<Flag> f;
  auto add_model = [&] { f.insert(f.end(), kModelFlags.begin(), kModelFlags.end()); };
  switch (s) {
    case Subcommand::constants:
      add_model();
      f.push_back({"n", "n", "", FlagType::number, "index of the norming sequences"});
      break;
    case Subcommand::simulate:
      add_model();
      f.push_back({"horizon", "horizon", "", FlagType::number, "time horizon"});
      f.push_back({"dt", "dt", "", FlagType::number, "Euler step"});
      f.push_back({"seed", "seed", "", FlagType::integer, "random seed"});
      f.push_back({"format", "format", "", FlagType::text, "csv (path) or json (statistics)"});
      f.push_back({"window", "window", "", FlagType::interval, "window a,b for the statistics"});
      f.push_back({"output", "output", "", FlagType::text, "output file (default stdout)"});
      break;
    case Subcommand::estimate:
      add_model();
      f.push_back({"stats", "stats", "", FlagType::text, "statistics JSON file"});
      f.push_back({"window", "window", "", FlagType::interval, "restricted estimator on window a,b"});
      f.push_back({"theta", "theta", "", FlagType::number_list, "point for the log-likelihood ratio"});
      f.push_back({"output", "output", "", FlagType::text, "output file (default stdout)"});
      break;
    case Subcommand::limits:
      f.push_back({"alpha", "alpha", "", FlagType::number, "index in (0,1)"});
      f.push_back({"dim", "dim", "", FlagType::integer, "dimension"});
      f.push_back({"cov", "cov", "", FlagType::text, "JSON file holding the covariance matrix"});
      f.push_back({"n", "n", "", FlagType::integer, "number of draws"});
      f.push_back({"seed", "seed", "", FlagType::integer, "random seed"});
      f.push_back({"risk", "risk", "", FlagType::boolean, "estimate E loss(Z) instead of emitting draws"});
      f.push_back({"loss", "loss", "", FlagType::text, "truncated-quadratic, exp-quadratic or constant"});
      f.push_back({"loss-cap", "loss_cap", "", FlagType::number, "cap of the truncated loss"});
      f.push_back({"output", "output", "", FlagType::text, "output file (default stdout)"});
      break;
    case Subcommand::experiment:
      add_model();
      f.push_back({"kind", "", "/kind", FlagType::text, "identity, rate, tail, rlt or risk"});
      f.push_back({"horizons", "", "/horizons", FlagType::number_list, "comma-separated horizons"});
      f.push_back({"dt", "", "/dt", FlagType::number, "Euler step"});
      f.push_back({"replications", "", "/replications", FlagType::integer, "replications"});
      f.push_back({"seed", "", "/master_seed", FlagType::integer, "master seed"});
      f.push_back({"window", "", "/window", FlagType::interval, "window a,b"});
      f.push_back({"output", "", "/output", FlagType::text, "report stem (<stem>.json, <stem>.csv)"});
      break;
    case Subcommand::check:
      f.push_back({"seed", "seed", "", FlagType::integer, "random seed"});
      break;
  }
  return f;
}

double parse_number(const std::string& flag, const std::string& s) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw UsageError("--" + flag + ": '" + s + "' is not a number");
  }
}

std::vector<double> parse_list(const std::string& flag, const std::string& s) {
  std::vector<double> out;
  if (s.empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(flag, item));
  return out;
}

Json flag_value(const Flag& f, const std::string& raw) {
  switch (f.type) {
    case FlagType::number:
      return parse_number(f.name, raw);
    case FlagType::integer: {
      try {
        std::size_t pos = 0;
        if (!raw.empty() && raw[0] == '-') throw std::invalid_argument(raw);
        const unsigned long long v = std::stoull(raw, &pos);
        if (pos != raw.size()) throw std::invalid_argument(raw);
        return v;
      } catch (const std::exception&) {
        throw UsageError(std::string("--") + f.name + ": '" + raw + "' is not a nonnegative integer");
      }
    }
    case FlagType::text:
      return raw;
    case FlagType::number_list:
      return parse_list(f.name, raw);
    case FlagType::interval: {
      const auto v = parse_list(f.name, raw);
      if (v.size() != 2 || !(v[1] > v[0])) {
        throw UsageError(std::string("--") + f.name + ": expected a,b with a < b");
      }
      return Json::array({v[0], v[1]});
    }
    case FlagType::boolean:
      return true;
  }
  return nullptr;
}

template <typename T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw UsageError(std::string("--") + key + ": value of the wrong type");
  }
}

void build_model(const Json& m, CliConfig& c) {
  c.spec.sigma = get_or(m, "sigma", 1.0);
  c.spec.x0 = get_or(m, "x0", 0.0);
  try {
    c.spec.basis = DriftBasis::from_name(get_or<std::string>(m, "basis", "none"));
  } catch (const ConfigError& e) {
    throw UsageError(std::string("--basis: ") + e.what());
  }
  c.theta.theta1 = get_or(m, "theta1", 0.0);
  c.theta.theta2 = get_or(m, "theta2", std::vector<double>{});
  if (c.theta.theta2.empty() && c.spec.basis.size() > 0) c.theta.theta2.assign(c.spec.basis.size(), 0.0);
  if (!(c.spec.sigma > 0.0) || !std::isfinite(c.spec.sigma)) throw UsageError("--sigma: must be positive");
  if (!std::isfinite(c.spec.x0)) throw UsageError("--x0: must be finite");
  if (c.theta.theta2.size() != c.spec.basis.size()) {
    throw UsageError("--theta2: basis '" + c.spec.basis.name() + "' needs " +
                     std::to_string(c.spec.basis.size()) + " values, got " +
                     std::to_string(c.theta.theta2.size()));
  }
}

void require_theta(const CliConfig& c) {
  if (in_parameter_space(c.spec, c.theta)) return;
  const double b = 0.5 * c.spec.sigma * c.spec.sigma;
  std::ostringstream msg;
  msg << "--theta1: " << c.theta.theta1 << " is outside the parameter interval (" << -b << ", " << b
      << ") for sigma = " << c.spec.sigma;
  for (double t : c.theta.theta2) {
    if (!std::isfinite(t)) msg.str("--theta2: values must be finite");
  }
  throw UsageError(msg.str());
}

void check_known_keys(const Json& j, const std::vector<Flag>& flags) {
  for (const auto& [k, v] : j.items()) {
    bool known = k == "verbosity";
    for (const auto& f : flags) known = known || k == f.flat_key;
    if (!known) throw UsageError("config file: unknown key '" + k + "'");
  }
}

CliConfig build(Subcommand s, const Json& merged, int verbosity) {
  CliConfig c;
  c.subcommand = s;
  c.merged = merged;
  c.verbosity = verbosity;
  if (s == Subcommand::experiment) {
    try {
      c.experiment = experiment_config_from_json(merged);
      c.experiment.validate();
    } catch (const UsageError&) {
      throw;
    } catch (const Error& e) {
      throw UsageError(std::string("experiment config: ") + e.what());
    }
    c.spec = c.experiment.spec;
    c.theta = c.experiment.theta;
    c.seed = c.experiment.master_seed;
    c.output = c.experiment.output;
    return c;
  }
  check_known_keys(merged, flags_for(s));
  c.seed = get_or<std::uint64_t>(merged, "seed", 1);
  c.output = get_or<std::string>(merged, "output", "");
  if (merged.contains("window") && !merged.at("window").is_null()) {
    try {
      c.window = interval_from_json(merged.at("window"));
    } catch (const ConfigError& e) {
      throw UsageError(std::string("--window: ") + e.what());
    }
  }
  switch (s) {
    case Subcommand::constants:
      build_model(merged, c);
      require_theta(c);
      c.n = get_or(merged, "n", 1.0);
      if (!(c.n >= 1.0)) throw UsageError("--n: must be at least 1");
      break;
    case Subcommand::simulate:
      build_model(merged, c);
      require_theta(c);
      c.simulate.horizon = get_or(merged, "horizon", c.simulate.horizon);
      c.simulate.dt = get_or(merged, "dt", c.simulate.dt);
      c.simulate.format = get_or(merged, "format", c.simulate.format);
      if (!(c.simulate.dt > 0.0)) throw UsageError("--dt: must be positive");
      if (!(c.simulate.horizon >= 0.0) || !std::isfinite(c.simulate.horizon)) {
        throw UsageError("--horizon: must be nonnegative");
      }
      if (c.simulate.horizon > 0.0 && c.simulate.dt > c.simulate.horizon) {
        throw UsageError("--dt: must not exceed --horizon");
      }
      if (c.simulate.format != "csv" && c.simulate.format != "json") {
        throw UsageError("--format: expected csv or json");
      }
      if (c.window && !c.window->has_interior_point(c.spec.x0)) {
        throw UsageError("--window: must contain x0 in its interior");
      }
      break;
    case Subcommand::estimate:
      build_model(merged, c);
      c.estimate.stats_path = get_or<std::string>(merged, "stats", "");
      if (c.estimate.stats_path.empty()) throw UsageError("--stats: required");
      if (merged.contains("theta")) {
        const auto v = get_or(merged, "theta", std::vector<double>{});
        if (v.size() != c.spec.dim()) {
          throw UsageError("--theta: expected " + std::to_string(c.spec.dim()) + " values");
        }
        ParamVector p;
        p.theta1 = v[0];
        p.theta2.assign(v.begin() + 1, v.end());
        c.estimate.theta = p;
      }
      break;
    case Subcommand::limits: {
      auto& l = c.limits;
      l.alpha = get_or(merged, "alpha", l.alpha);
      l.dim = static_cast<int>(get_or<long long>(merged, "dim", l.dim));
      l.cov_path = get_or(merged, "cov", l.cov_path);
      l.n = get_or(merged, "n", l.n);
      l.risk = get_or(merged, "risk", false);
      l.loss = get_or(merged, "loss", l.loss);
      l.loss_cap = get_or(merged, "loss_cap", l.loss_cap);
      if (!(l.alpha > 0.0 && l.alpha < 1.0)) throw UsageError("--alpha: must lie in (0, 1)");
      if (l.dim < 1) throw UsageError("--dim: must be at least 1");
      if (l.n < 1 || (l.risk && l.n < 2)) throw UsageError("--n: too few draws");
      try {
        Loss::from_name(l.loss, l.loss_cap);
      } catch (const ConfigError& e) {
        throw UsageError(std::string("--loss: ") + e.what());
      }
      break;
    }
    case Subcommand::check:
    case Subcommand::experiment:
      break;
  }
  return c;
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
  } else {
    write_text_file(path, text);
  }
}

Eigen::MatrixXd read_matrix(const std::string& path) {
  const Json j = read_json_file(path);
  const Json& rows = j.is_object() && j.contains("cov") ? j.at("cov") : j;
  if (!rows.is_array() || rows.empty()) throw ConfigError("--cov: expected a square JSON array");
  const auto d = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd m(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const Json& r = rows[static_cast<std::size_t>(i)];
    if (!r.is_array() || static_cast<Eigen::Index>(r.size()) != d) {
      throw ConfigError("--cov: expected a square JSON array");
    }
    for (Eigen::Index k = 0; k < d; ++k) m(i, k) = r[static_cast<std::size_t>(k)].get<double>();
  }
  return m;
}

int run_constants(const CliConfig& c, std::ostream& out) {
  const auto k = asymptotic_constants(c.spec, c.theta);
  const auto nm = norming(c.spec, c.theta, c.n);
  Json j;
  j["lambda1"] = k.lambda1;
  j["lambda2"] = k.lambda2;
  j["alpha"] = k.alpha;
  j["psi_plus"] = k.psi_plus;
  j["psi_minus"] = k.psi_minus;
  j["d_weight"] = k.d_weight;
  j["n"] = c.n;
  j["alpha_n"] = nm.alpha_n;
  j["delta_n"] = nm.delta_n;
  j["recurrence"] = std::string(to_string(classify_recurrence(c.spec, c.theta.theta1)));
  write_output(c.output, j.dump(2) + "\n", out);
  return 0;
}

int run_simulate(const CliConfig& c, std::ostream& out) {
  const auto path = simulate_path(c.spec, c.theta, c.simulate.horizon, c.simulate.dt, c.seed);
  if (c.simulate.format == "csv") {
    write_output(c.output, path_csv(path), out);
  } else {
    write_output(c.output, to_json(accumulate_stats(c.spec, path, c.window)).dump(2) + "\n", out);
  }
  return 0;
}

int run_estimate(const CliConfig& c, std::ostream& out) {
  const SufficientStats stats = stats_from_json(read_json_file(c.estimate.stats_path));
  if (stats.dim() != c.spec.dim()) {
    throw UsageError("--basis: statistics have dimension " + std::to_string(stats.dim()) +
                     " but the model has " + std::to_string(c.spec.dim()));
  }
  EstimateResult est;
  if (c.window) {
    if (!stats.window || !(*stats.window == *c.window)) {
      throw UsageError("--window: statistics were not accumulated on this window");
    }
    est = restricted_mle(stats, c.spec.x0);
  } else {
    est = mle(stats);
  }
  Json j = to_json(est);
  if (c.estimate.theta) {
    j["loglik_at"] = log_likelihood_ratio(stats, est.theta_hat, c.estimate.theta->to_vector());
  } else {
    j["loglik_at"] = nullptr;
  }
  write_output(c.output, j.dump(2) + "\n", out);
  return 0;
}

int run_limits(const CliConfig& c, std::ostream& out) {
  LimitLawSpec law;
  law.alpha = c.limits.alpha;
  law.cov = c.limits.cov_path.empty() ? Eigen::MatrixXd::Identity(c.limits.dim, c.limits.dim)
                                      : read_matrix(c.limits.cov_path);
  if (c.limits.risk) {
    const Loss loss = Loss::from_name(c.limits.loss, c.limits.loss_cap);
    const auto r = limit_risk(law, loss, c.limits.n, c.seed);
    Json j;
    j["loss"] = loss.name();
    j["alpha"] = law.alpha;
    j["n"] = r.n;
    j["mean"] = r.mean;
    j["stderr"] = r.stderr_;
    write_output(c.output, j.dump(2) + "\n", out);
    return 0;
  }
  const LimitErrorSampler sampler(law);
  std::ostringstream os;
  for (int i = 0; i < law.dim(); ++i) os << (i ? "," : "") << 'z' << (i + 1);
  os << '\n';
  for (std::size_t k = 0; k < c.limits.n; ++k) {
    RandomStream rng(c.seed, k);
    const Eigen::VectorXd z = sampler.sample(rng);
    for (int i = 0; i < z.size(); ++i) os << (i ? "," : "") << format_double(z[i]);
    os << '\n';
  }
  write_output(c.output, os.str(), out);
  return 0;
}

void print_rows(const ExperimentReport& r, std::ostream& out) {
  for (const auto& row : r.rows) {
    if (!row.tolerance) continue;
    out << (row.pass ? "PASS " : "FAIL ") << row.stat_name << " horizon=" << format_double(row.horizon)
        << " coord=" << row.coord << " value=" << format_double(row.value);
    if (row.reference) out << " reference=" << format_double(*row.reference);
    out << " tolerance=" << format_double(*row.tolerance) << '\n';
  }
}

int run_experiment_cmd(const CliConfig& c, std::ostream& out, std::ostream& err) {
  if (c.verbosity > 0) err << "running " << to_string(c.experiment.kind) << " experiment\n";
  const ExperimentReport report = run_experiment(c.experiment);
  if (!c.output.empty()) {
    emit_report(report, c.output);
    print_rows(report, out);
  } else {
    out << to_json(report).dump(2) << '\n';
  }
  if (c.verbosity > 0) err << "wall clock " << report.wall_clock_seconds << " s\n";
  return report.passed ? 0 : 1;
}

int run_check(const CliConfig& c, std::ostream& out) {
  bool ok = true;
  ExperimentConfig id;
  id.kind = ExperimentKind::identity;
  id.spec.basis = DriftBasis::sinc();
  id.theta = ParamVector{0.0, {0.3}};
  id.horizons = {50.0};
  id.dt = 1e-2;
  id.replications = 20;
  id.master_seed = c.seed;
  const auto report = run_identity_suite(id);
  print_rows(report, out);
  ok = ok && report.passed;

  constexpr std::size_t kDraws = 20000;
  std::uint64_t tag = 17;
  for (double alpha : {0.25, 0.5, 0.75}) {
    std::vector<double> v(kDraws);
    const std::uint64_t stream_seed = derive_seed(c.seed, tag++);
    for (std::size_t i = 0; i < kDraws; ++i) {
      RandomStream rng(stream_seed, i);
      v[i] = std::exp(-sample_stable(alpha, rng));
    }
    const auto s = summarize(v);
    const double target = std::exp(-1.0);
    const bool pass = std::abs(s.mean - target) <= 3.0 * s.stderr_;
    out << (pass ? "PASS " : "FAIL ") << "stable_laplace alpha=" << alpha
        << " value=" << format_double(s.mean) << " reference=" << format_double(target) << '\n';
    ok = ok && pass;
  }
  std::vector<double> v(kDraws);
  for (std::size_t i = 0; i < kDraws; ++i) {
    RandomStream rng(derive_seed(c.seed, 20), i);
    v[i] = sample_mittag_leffler(0.5, rng);
  }
  const auto s = summarize(v);
  const double target = 1.0 / std::tgamma(1.5);
  const bool pass = std::abs(s.mean - target) <= 3.0 * s.stderr_;
  out << (pass ? "PASS " : "FAIL ") << "mittag_leffler_mean alpha=0.5 value=" << format_double(s.mean)
      << " reference=" << format_double(target) << '\n';
  ok = ok && pass;
  return ok ? 0 : 1;
}

}  // namespace

std::string_view to_string(Subcommand s) {
  switch (s) {
    case Subcommand::constants:
      return "constants";
    case Subcommand::simulate:
      return "simulate";
    case Subcommand::estimate:
      return "estimate";
    case Subcommand::limits:
      return "limits";
    case Subcommand::experiment:
      return "experiment";
    case Subcommand::check:
      return "check";
  }
  return "unknown";
}

ParseOutcome parse_config(const std::vector<std::string>& args) {
  CLI::App app{"Simulation, estimation and limit laws for a null recurrent diffusion", "nullrec"};
  app.require_subcommand(1);
  int verbosity = 0;
  app.add_flag("-v,--verbose", verbosity, "more progress output on stderr");

  const std::vector<Subcommand> subs = {Subcommand::constants, Subcommand::simulate,
                                        Subcommand::estimate,  Subcommand::limits,
                                        Subcommand::experiment, Subcommand::check};
  const std::map<Subcommand, const char*> descriptions = {
      {Subcommand::constants, "asymptotic constants and norming sequences as JSON"},
      {Subcommand::simulate, "simulate a path (CSV) or its sufficient statistics (JSON)"},
      {Subcommand::estimate, "ML or restricted estimate from a statistics file"},
      {Subcommand::limits, "draws from the mixed normal limit law, or its risk"},
      {Subcommand::experiment, "run a Monte Carlo experiment from a JSON config"},
      {Subcommand::check, "fast self-test: identity suite and sampler calibrations"}};

  std::map<Subcommand, CLI::App*> apps;
  std::map<Subcommand, std::vector<std::pair<Flag, CLI::Option*>>> options;
  std::map<Subcommand, std::map<std::string, std::string>> raw;
  std::map<Subcommand, bool> bools;
  std::map<Subcommand, std::string> config_paths;
  for (Subcommand s : subs) {
    CLI::App* sub = app.add_subcommand(std::string(to_string(s)), descriptions.at(s));
    apps[s] = sub;
    sub->add_option("--config", config_paths[s], "JSON config file; flags override its values");
    for (const Flag& f : flags_for(s)) {
      CLI::Option* opt = nullptr;
      if (f.type == FlagType::boolean) {
        opt = sub->add_flag(std::string("--") + f.name, bools[s], f.help);
      } else {
        opt = sub->add_option(std::string("--") + f.name, raw[s][f.name], f.help);
      }
      options[s].push_back({f, opt});
    }
  }

  std::vector<const char*> argv;
  argv.push_back("nullrec");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return {std::nullopt, app.help()};
  } catch (const CLI::CallForAllHelp& e) {
    return {std::nullopt, app.help("", CLI::AppFormatMode::All)};
  } catch (const CLI::ParseError& e) {
    // Subcommand help surfaces as CallForHelp from the parent.
    throw UsageError(e.what());
  }

  for (Subcommand s : subs) {
    if (!apps[s]->parsed()) continue;
    Json merged = Json::object();
    if (!config_paths[s].empty()) {
      try {
        merged = read_json_file(config_paths[s]);
      } catch (const ConfigError& e) {
        throw UsageError(std::string("--config: ") + e.what());
      }
      if (!merged.is_object()) throw UsageError("--config: file must hold a JSON object");
    }
    for (const auto& [f, opt] : options[s]) {
      if (opt->count() == 0) continue;
      const Json v = f.type == FlagType::boolean ? Json(bools[s]) : flag_value(f, raw[s][f.name]);
      if (s == Subcommand::experiment) {
        merged[Json::json_pointer(f.nested_pointer)] = v;
      } else {
        merged[f.flat_key] = v;
      }
    }
    return {build(s, merged, verbosity), ""};
  }
  throw UsageError("a subcommand is required");
}

int dispatch(const CliConfig& c, std::ostream& out, std::ostream& err) {
  switch (c.subcommand) {
    case Subcommand::constants:
      return run_constants(c, out);
    case Subcommand::simulate:
      return run_simulate(c, out);
    case Subcommand::estimate:
      return run_estimate(c, out);
    case Subcommand::limits:
      return run_limits(c, out);
    case Subcommand::experiment:
      return run_experiment_cmd(c, out, err);
    case Subcommand::check:
      return run_check(c, out);
  }
  return 2;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    const ParseOutcome parsed = parse_config(args);
    if (!parsed.config) {
      out << parsed.help;
      return 0;
    }
    return dispatch(*parsed.config, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\nrun 'nullrec --help' for the list of flags\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace nullrec::cli
