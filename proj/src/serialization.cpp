#include "nullrec/serialization.hpp"

#include "nullrec/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace nullrec {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

void reject_unknown(const Json& j, std::initializer_list<const char*> keys, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items()) {
    if (!allowed.count(k)) throw ConfigError("unknown key '" + k + "' in " + where);
  }
}

template <typename T>
void read_if(const Json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

Eigen::VectorXd vector_from_json(const Json& j, const char* what) {
  if (!j.is_array()) throw ConfigError(std::string(what) + " must be an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError(std::string(what) + " must hold numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

std::string csv_number(double v) { return format_double(v); }

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

Json to_json(const Interval& w) { return Json::array({number_or_null(w.lo), number_or_null(w.hi)}); }

Interval interval_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw ConfigError("window must be a two-element array [lo, hi]");
  Interval w;
  w.lo = j[0].is_null() ? -kInf : j[0].get<double>();
  w.hi = j[1].is_null() ? kInf : j[1].get<double>();
  if (!(w.hi > w.lo)) throw ConfigError("window must satisfy lo < hi");
  return w;
}

Json to_json(const SufficientStats& stats) {
  Json out;
  out["y"] = std::vector<double>(stats.y.data(), stats.y.data() + stats.y.size());
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < stats.j.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < stats.j.cols(); ++c) row.push_back(stats.j(i, c));
    rows.push_back(std::move(row));
  }
  out["j"] = std::move(rows);
  out["t"] = stats.t;
  out["window"] = stats.window ? to_json(*stats.window) : Json(nullptr);
  return out;
}

SufficientStats stats_from_json(const Json& j) {
  reject_unknown(j, {"y", "j", "t", "window"}, "statistics");
  if (!j.contains("y") || !j.contains("j")) throw ConfigError("statistics need 'y' and 'j'");
  SufficientStats s;
  s.y = vector_from_json(j.at("y"), "y");
  const Json& rows = j.at("j");
  const auto d = s.y.size();
  if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != d) {
    throw DimensionMismatch("j must be a " + std::to_string(d) + "x" + std::to_string(d) + " array");
  }
  s.j.resize(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const Eigen::VectorXd r = vector_from_json(rows[static_cast<std::size_t>(i)], "j row");
    if (r.size() != d) throw DimensionMismatch("j rows must have " + std::to_string(d) + " entries");
    s.j.row(i) = r.transpose();
  }
  read_if(j, "t", s.t);
  if (j.contains("window") && !j.at("window").is_null()) s.window = interval_from_json(j.at("window"));
  return s;
}

Json to_json(const EstimateResult& est) {
  Json out;
  out["theta_hat"] = std::vector<double>(est.theta_hat.data(), est.theta_hat.data() + est.theta_hat.size());
  out["j_invertible"] = est.j_invertible;
  out["conditioning"] = est.conditioning;
  out["horizon"] = est.horizon;
  return out;
}

Json to_json(const AsymptoticConstants& c) {
  Json out;
  out["lambda1"] = c.lambda1;
  out["lambda2"] = c.lambda2;
  out["alpha"] = c.alpha;
  out["psi_plus"] = c.psi_plus;
  out["psi_minus"] = c.psi_minus;
  out["d_weight"] = c.d_weight;
  return out;
}

Json to_json(const ExperimentConfig& c) {
  Json out;
  out["kind"] = std::string(to_string(c.kind));
  out["model"] = {{"sigma", c.spec.sigma}, {"basis", c.spec.basis.name()}, {"x0", c.spec.x0}};
  out["theta"] = {{"theta1", c.theta.theta1}, {"theta2", c.theta.theta2}};
  out["horizons"] = c.horizons;
  out["dt"] = c.dt;
  out["replications"] = c.replications;
  out["master_seed"] = c.master_seed;
  out["window"] = c.window ? to_json(*c.window) : Json(nullptr);
  out["output"] = c.output;
  out["identity"] = {{"tolerance", c.identity.tolerance}};
  out["rate"] = {{"limit_draws", c.rate.limit_draws},
                 {"ks_horizon_tolerance", c.rate.ks_horizon_tolerance},
                 {"ks_limit_tolerance", c.rate.ks_limit_tolerance},
                 {"ks_calibration_tolerance", c.rate.ks_calibration_tolerance},
                 {"min_nonsingular_fraction", c.rate.min_nonsingular_fraction}};
  out["tail"] = {{"target_cycles", c.tail.target_cycles}, {"min_cycles", c.tail.min_cycles},
                 {"lanes", c.tail.lanes},                 {"cycle_cap", c.tail.cycle_cap},
                 {"hill_k", c.tail.hill_k},               {"hill_fraction", c.tail.hill_fraction},
                 {"alpha_tolerance", c.tail.alpha_tolerance},
                 {"constant_tolerance", c.tail.constant_tolerance},
                 {"tail_level", c.tail.tail_level}};
  out["rlt"] = {{"checkpoints", c.rlt.checkpoints},
                {"bias_tolerance", c.rlt.bias_tolerance},
                {"inconsistency_factor", c.rlt.inconsistency_factor}};
  out["risk"] = {{"loss", c.risk.loss},
                 {"loss_cap", c.risk.loss_cap},
                 {"radius", c.risk.radius},
                 {"limit_draws", c.risk.limit_draws},
                 {"stderr_multiplier", c.risk.stderr_multiplier}};
  return out;
}

ExperimentConfig experiment_config_from_json(const Json& j) {
  reject_unknown(j, {"kind", "model", "theta", "horizons", "dt", "replications", "master_seed",
                     "window", "output", "identity", "rate", "tail", "rlt", "risk"},
                 "experiment config");
  ExperimentConfig c;
  if (j.contains("kind")) c.kind = experiment_kind_from_name(j.at("kind").get<std::string>());
  if (j.contains("model")) {
    const Json& m = j.at("model");
    reject_unknown(m, {"sigma", "basis", "x0"}, "model");
    read_if(m, "sigma", c.spec.sigma);
    read_if(m, "x0", c.spec.x0);
    if (m.contains("basis")) c.spec.basis = DriftBasis::from_name(m.at("basis").get<std::string>());
  }
  if (j.contains("theta")) {
    const Json& t = j.at("theta");
    reject_unknown(t, {"theta1", "theta2"}, "theta");
    read_if(t, "theta1", c.theta.theta1);
    read_if(t, "theta2", c.theta.theta2);
  }
  read_if(j, "horizons", c.horizons);
  read_if(j, "dt", c.dt);
  if (j.contains("replications")) {
    const Json& r = j.at("replications");
    if (!r.is_number_integer() || r.get<long long>() < 0) {
      throw ConfigError("replications must be a nonnegative integer");
    }
    c.replications = r.get<std::size_t>();
  }
  read_if(j, "master_seed", c.master_seed);
  if (j.contains("window") && !j.at("window").is_null()) c.window = interval_from_json(j.at("window"));
  read_if(j, "output", c.output);
  if (j.contains("identity")) {
    reject_unknown(j.at("identity"), {"tolerance"}, "identity");
    read_if(j.at("identity"), "tolerance", c.identity.tolerance);
  }
  if (j.contains("rate")) {
    const Json& r = j.at("rate");
    reject_unknown(r, {"limit_draws", "ks_horizon_tolerance", "ks_limit_tolerance",
                       "ks_calibration_tolerance", "min_nonsingular_fraction"},
                   "rate");
    read_if(r, "limit_draws", c.rate.limit_draws);
    read_if(r, "ks_horizon_tolerance", c.rate.ks_horizon_tolerance);
    read_if(r, "ks_limit_tolerance", c.rate.ks_limit_tolerance);
    read_if(r, "ks_calibration_tolerance", c.rate.ks_calibration_tolerance);
    read_if(r, "min_nonsingular_fraction", c.rate.min_nonsingular_fraction);
  }
  if (j.contains("tail")) {
    const Json& t = j.at("tail");
    reject_unknown(t, {"target_cycles", "min_cycles", "lanes", "cycle_cap", "hill_k", "hill_fraction",
                       "alpha_tolerance", "constant_tolerance", "tail_level"},
                   "tail");
    read_if(t, "target_cycles", c.tail.target_cycles);
    read_if(t, "min_cycles", c.tail.min_cycles);
    read_if(t, "lanes", c.tail.lanes);
    read_if(t, "cycle_cap", c.tail.cycle_cap);
    read_if(t, "hill_k", c.tail.hill_k);
    read_if(t, "hill_fraction", c.tail.hill_fraction);
    read_if(t, "alpha_tolerance", c.tail.alpha_tolerance);
    read_if(t, "constant_tolerance", c.tail.constant_tolerance);
    read_if(t, "tail_level", c.tail.tail_level);
  }
  if (j.contains("rlt")) {
    const Json& r = j.at("rlt");
    reject_unknown(r, {"checkpoints", "bias_tolerance", "inconsistency_factor"}, "rlt");
    read_if(r, "checkpoints", c.rlt.checkpoints);
    read_if(r, "bias_tolerance", c.rlt.bias_tolerance);
    read_if(r, "inconsistency_factor", c.rlt.inconsistency_factor);
  }
  if (j.contains("risk")) {
    const Json& r = j.at("risk");
    reject_unknown(r, {"loss", "loss_cap", "radius", "limit_draws", "stderr_multiplier"}, "risk");
    read_if(r, "loss", c.risk.loss);
    read_if(r, "loss_cap", c.risk.loss_cap);
    read_if(r, "radius", c.risk.radius);
    read_if(r, "limit_draws", c.risk.limit_draws);
    read_if(r, "stderr_multiplier", c.risk.stderr_multiplier);
  }
  return c;
}

Json to_json(const ExperimentReport& report) {
  Json out;
  out["kind"] = std::string(to_string(report.kind));
  out["passed"] = report.passed;
  out["wall_clock_seconds"] = report.wall_clock_seconds;
  Json rows = Json::array();
  for (const auto& r : report.rows) {
    Json row;
    row["horizon"] = r.horizon;
    row["coord"] = r.coord;
    row["stat_name"] = r.stat_name;
    row["value"] = number_or_null(r.value);
    row["reference"] = r.reference ? number_or_null(*r.reference) : Json(nullptr);
    row["tolerance"] = r.tolerance ? number_or_null(*r.tolerance) : Json(nullptr);
    row["pass"] = r.pass;
    rows.push_back(std::move(row));
  }
  out["rows"] = std::move(rows);
  out["notes"] = report.notes;
  return out;
}

std::string report_csv(const ExperimentReport& report) {
  std::ostringstream os;
  os << "horizon,coord,stat_name,value,reference,tolerance,pass\n";
  for (const auto& r : report.rows) {
    os << csv_number(r.horizon) << ',' << r.coord << ',' << r.stat_name << ',' << csv_number(r.value)
       << ',' << (r.reference ? csv_number(*r.reference) : "") << ','
       << (r.tolerance ? csv_number(*r.tolerance) : "") << ',' << (r.pass ? "true" : "false") << '\n';
  }
  return os.str();
}

std::string path_csv(const DiffusionPath& path) {
  std::ostringstream os;
  os << "t,x\n";
  for (std::size_t k = 0; k < path.values.size(); ++k) {
    os << csv_number(path.time(k)) << ',' << csv_number(path.values[k]) << '\n';
  }
  return os.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot open '" + path.string() + "' for writing");
  f << text;
  if (!f) throw Error("failed writing '" + path.string() + "'");
}

void emit_report(const ExperimentReport& report, const std::filesystem::path& stem) {
  std::filesystem::path json_path = stem;
  json_path += ".json";
  std::filesystem::path csv_path = stem;
  csv_path += ".csv";
  write_text_file(json_path, to_json(report).dump(2) + "\n");
  write_text_file(csv_path, report_csv(report));
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open '" + path.string() + "'");
  try {
    return Json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("invalid JSON in '" + path.string() + "': " + e.what());
  }
}

}  // namespace nullrec
