#include "nullrec/errors.hpp"
#include "nullrec/harness.hpp"
#include "nullrec/rng.hpp"
#include "nullrec/serialization.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace nullrec;

namespace {

ExperimentConfig small_identity() {
  ExperimentConfig c;
  c.kind = ExperimentKind::identity;
  c.spec.basis = DriftBasis::sinc();
  c.theta = ParamVector{0.0, {0.3}};
  c.horizons = {20.0};
  c.dt = 1e-2;
  c.replications = 8;
  c.master_seed = 11;
  return c;
}

}  // namespace

TEST(Harness, KindNames) {
  for (auto k : {ExperimentKind::identity, ExperimentKind::rate, ExperimentKind::tail, ExperimentKind::rlt,
                 ExperimentKind::risk}) {
    EXPECT_EQ(experiment_kind_from_name(to_string(k)), k);
  }
  EXPECT_THROW(experiment_kind_from_name("bogus"), ConfigError);
}

TEST(Harness, ValidateRejectsBadConfigs) {
  auto c = small_identity();
  c.replications = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_THROW(run_experiment(c), ConfigError);
  c = small_identity();
  c.horizons = {10.0, 5.0};
  EXPECT_THROW(c.validate(), ConfigError);
  c = small_identity();
  c.window = Interval{1.0, 2.0};
  EXPECT_THROW(c.validate(), ConfigError);
  c = small_identity();
  c.theta.theta1 = 0.7;
  EXPECT_THROW(c.validate(), ParameterDomainError);
  c = small_identity();
  c.kind = ExperimentKind::rate;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Harness, IdentitySuitePassesAndIsDeterministic) {
  const auto c = small_identity();
  const auto a = run_experiment(c);
  EXPECT_TRUE(a.passed);
  EXPECT_FALSE(a.rows.empty());
  EXPECT_EQ(a, run_experiment(c));
  EXPECT_EQ(report_csv(a), report_csv(run_experiment(c)));
  auto other = c;
  other.master_seed = 12;
  EXPECT_NE(report_csv(a), report_csv(run_experiment(other)));
}

TEST(Harness, ReportFind) {
  ExperimentReport r;
  r.add({10.0, 0, "x", 1.0, std::nullopt, std::nullopt, true});
  r.add({20.0, 1, "x", 2.0, 0.0, 0.1, false});
  EXPECT_FALSE(r.passed);
  EXPECT_EQ(r.find("x")->value, 1.0);
  EXPECT_EQ(r.find("x", 20.0)->value, 2.0);
  EXPECT_EQ(r.find("x", -1.0, 1)->value, 2.0);
  EXPECT_EQ(r.find("y"), nullptr);
}

TEST(TailSummary, SyntheticParetoWithCensoring) {
  const double alpha = 0.5;
  const double cap = 4e4;
  std::vector<double> d(20000);
  std::vector<bool> censored(d.size());
  RandomStream rng(5, 0);
  for (std::size_t i = 0; i < d.size(); ++i) {
    // P(D > t) = t^{-1/2} for t >= 1.
    const double x = std::pow(rng.uniform(), -1.0 / alpha);
    censored[i] = x >= cap;
    d[i] = std::min(x, cap);
  }
  TailOptions opts;
  opts.hill_fraction = 0.05;
  const auto s = summarize_tail(d, censored, alpha, opts);
  EXPECT_EQ(s.hill_k, 1000u);
  EXPECT_EQ(s.completed + s.censored, d.size());
  EXPECT_NEAR(s.alpha_hat, alpha, 0.05);
  EXPECT_NEAR(s.tail_constant, 1.0, 0.15);
}

TEST(TailSummary, HillKDefaults) {
  std::vector<double> d(100);
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = 1.0 + static_cast<double>(i);
  const std::vector<bool> none(d.size(), false);
  TailOptions opts;
  EXPECT_EQ(summarize_tail(d, none, 0.5, opts).hill_k, 10u);
  opts.hill_k = 7;
  EXPECT_EQ(summarize_tail(d, none, 0.5, opts).hill_k, 7u);
}

TEST(Harness, ConstantLossRiskMeetsBoundExactly) {
  ExperimentConfig c;
  c.kind = ExperimentKind::risk;
  c.spec.basis = DriftBasis::sinc();
  c.theta = ParamVector{0.0, {0.3}};
  c.horizons = {20.0};
  c.replications = 5;
  c.window = Interval{-2.0, 2.0};
  c.risk.loss = "constant";
  c.risk.loss_cap = 1.5;
  c.risk.limit_draws = 100;
  const auto r = run_experiment(c);
  ASSERT_NE(r.find("risk_mle_sup"), nullptr);
  EXPECT_EQ(r.find("risk_mle_sup")->value, 1.5);
  EXPECT_EQ(r.find("risk_windowed_sup")->value, 1.5);
  EXPECT_TRUE(r.passed);
}

TEST(Harness, TailZeroToleranceFails) {
  ExperimentConfig c;
  c.kind = ExperimentKind::tail;
  c.spec.basis = DriftBasis::sinc();
  c.theta = ParamVector{0.0, {0.0}};
  c.horizons = {1.0};
  c.dt = 1e-2;
  c.tail.target_cycles = 200;
  c.tail.min_cycles = 10;
  c.tail.lanes = 4;
  c.tail.cycle_cap = 1e3;
  c.tail.alpha_tolerance = 0.0;
  c.tail.constant_tolerance = 0.0;
  const auto r = run_experiment(c);
  EXPECT_FALSE(r.passed);
  EXPECT_EQ(r, run_experiment(c));
}

TEST(Serialization, ConfigRoundTrip) {
  auto c = small_identity();
  c.window = Interval{-2.0, 3.0};
  c.tail.hill_fraction = 0.05;
  const Json j = to_json(c);
  const auto back = experiment_config_from_json(j);
  EXPECT_EQ(to_json(back).dump(), j.dump());
  Json bad = j;
  bad["unknown_key"] = 1;
  EXPECT_THROW(experiment_config_from_json(bad), ConfigError);
}

TEST(Serialization, StatsRoundTripIsExact) {
  SufficientStats s;
  s.y = Eigen::Vector2d(0.1, 1.0 / 3.0);
  s.j = Eigen::Matrix2d::Identity() * std::sqrt(2.0);
  s.t = 12.5;
  s.window = Interval{-2.0, 2.0};
  const auto back = stats_from_json(to_json(s));
  EXPECT_EQ(back.y, s.y);
  EXPECT_EQ(back.j, s.j);
  EXPECT_EQ(back.t, s.t);
  ASSERT_TRUE(back.window);
  EXPECT_EQ(back.window->lo, -2.0);
  const auto whole = interval_from_json(to_json(Interval::whole_line()));
  EXPECT_TRUE(whole.is_whole_line());
}

TEST(Serialization, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.0}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
}
