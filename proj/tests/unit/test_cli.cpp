#include "nullrec/cli.hpp"
#include "nullrec/serialization.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace nullrec;
using namespace nullrec::cli;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "nullrec_cli_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST(Cli, ParseSimulate) {
  const auto p = parse_config({"simulate", "--basis", "sinc", "--theta1", "0.1", "--theta2", "0.3", "--horizon",
                               "2", "--dt", "0.01", "--seed", "9"});
  ASSERT_TRUE(p.config);
  EXPECT_EQ(p.config->subcommand, Subcommand::simulate);
  EXPECT_EQ(p.config->theta.theta1, 0.1);
  EXPECT_EQ(p.config->theta.theta2, std::vector<double>{0.3});
  EXPECT_EQ(p.config->simulate.horizon, 2.0);
  EXPECT_EQ(p.config->seed, 9u);
}

TEST(Cli, HelpIsNotAnError) {
  const auto r = run_cli({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("simulate"), std::string::npos);
}

TEST(Cli, UsageErrorsNameTheFlag) {
  auto r = run_cli({"simulate", "--theta1", "0.6"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("--theta1"), std::string::npos);
  r = run_cli({"simulate", "--dt", "abc"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("--dt"), std::string::npos);
  r = run_cli({"simulate", "--no-such-flag", "1"});
  EXPECT_EQ(r.code, 2);
  r = run_cli({});
  EXPECT_EQ(r.code, 2);
}

TEST(Cli, FlagsOverrideConfigFile) {
  const auto cfg = scratch("override.json");
  std::ofstream(cfg) << R"({"sigma": 2.0, "horizon": 3.0, "dt": 0.5})";
  const auto p = parse_config({"simulate", "--config", cfg.string(), "--horizon", "4"});
  ASSERT_TRUE(p.config);
  EXPECT_EQ(p.config->spec.sigma, 2.0);
  EXPECT_EQ(p.config->simulate.horizon, 4.0);
  EXPECT_EQ(p.config->simulate.dt, 0.5);
}

TEST(Cli, ConstantsValues) {
  const auto r = run_cli({"constants", "--n", "100"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_DOUBLE_EQ(j["alpha"].get<double>(), 0.5);
  EXPECT_NEAR(j["d_weight"].get<double>(), std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(j["alpha_n"].get<double>(), 10.0 * std::sqrt(2.0) / 2.0, 1e-10);
}

TEST(Cli, SimulateCsvRowCount) {
  const auto r = run_cli({"simulate", "--horizon", "1", "--dt", "0.01", "--seed", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(count_lines(r.out), 102u);  // header plus 101 points
  EXPECT_EQ(r.out.substr(0, 4), "t,x\n");
}

TEST(Cli, SimulateThenEstimate) {
  const auto stats = scratch("stats.json");
  auto r = run_cli({"simulate", "--basis", "sinc", "--theta2", "0.3", "--horizon", "50", "--format", "json",
                    "--output", stats.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  r = run_cli({"estimate", "--basis", "sinc", "--stats", stats.string(), "--theta", "0,0.3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_TRUE(j.contains("theta_hat"));
  EXPECT_TRUE(j.contains("loglik_at"));
  r = run_cli({"estimate", "--basis", "fourier-1", "--stats", stats.string()});
  EXPECT_EQ(r.code, 2);
}

TEST(Cli, LimitsDraws) {
  const auto r = run_cli({"limits", "--alpha", "0.5", "--dim", "2", "--n", "25"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(count_lines(r.out), 26u);
  EXPECT_EQ(r.out.substr(0, 6), "z1,z2\n");
}

TEST(Cli, ExperimentExitCodes) {
  const auto cfg = scratch("tail.json");
  std::ofstream(cfg) << R"({"kind": "tail", "model": {"basis": "sinc"}, "theta": {"theta1": 0, "theta2": [0]},
    "horizons": [1], "dt": 0.01, "replications": 1,
    "tail": {"target_cycles": 100, "min_cycles": 10, "lanes": 2, "cycle_cap": 500,
             "alpha_tolerance": 0, "constant_tolerance": 0}})";
  const auto stem = scratch("tail_report");
  auto r = run_cli({"experiment", "--config", cfg.string(), "--output", stem.string()});
  EXPECT_EQ(r.code, 1) << r.err;
  EXPECT_NE(r.out.find("FAIL"), std::string::npos);
  r = run_cli({"experiment", "--config", cfg.string(), "--replications", "0"});
  EXPECT_EQ(r.code, 2);
}

TEST(Cli, EmitIsByteReproducible) {
  const auto cfg = scratch("identity.json");
  std::ofstream(cfg) << R"({"kind": "identity", "model": {"basis": "sinc"},
    "theta": {"theta1": 0, "theta2": [0.3]}, "horizons": [10], "dt": 0.01, "replications": 4,
    "master_seed": 5})";
  const auto a = scratch("id_a");
  const auto b = scratch("id_b");
  ASSERT_EQ(run_cli({"experiment", "--config", cfg.string(), "--output", a.string()}).code, 0);
  ASSERT_EQ(run_cli({"experiment", "--config", cfg.string(), "--output", b.string()}).code, 0);
  const std::string csv = slurp(a.string() + ".csv");
  EXPECT_EQ(csv, slurp(b.string() + ".csv"));
  const Json ja = Json::parse(slurp(a.string() + ".json"));
  const Json jb = Json::parse(slurp(b.string() + ".json"));
  EXPECT_EQ(ja["rows"], jb["rows"]);
  EXPECT_EQ(count_lines(csv), ja["rows"].size() + 1);
}
