#include "nullrec/errors.hpp"
#include "nullrec/limits.hpp"
#include "nullrec/statistics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace nullrec;

namespace {

std::vector<double> stable_draws(double alpha, std::size_t n, std::uint64_t seed) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    RandomStream rng(seed, i);
    out[i] = sample_stable(alpha, rng);
  }
  return out;
}

}  // namespace

TEST(Stable, LaplaceTransform) {
  std::uint64_t seed = 100;
  for (double alpha : {0.25, 0.5, 0.75}) {
    const auto s = stable_draws(alpha, 100000, seed++);
    for (double z : {0.5, 1.0, 2.0}) {
      std::vector<double> e(s.size());
      for (std::size_t i = 0; i < s.size(); ++i) e[i] = std::exp(-z * s[i]);
      const auto m = summarize(e);
      EXPECT_NEAR(m.mean, std::exp(-std::pow(z, alpha)), 4.0 * m.stderr_) << alpha << " " << z;
    }
  }
}

TEST(Stable, HalfIsLevy) {
  // E exp(-z S) = exp(-sqrt z) is the Levy law with scale 1/2: P(S <= x) = erfc(1 / (2 sqrt x)).
  const auto s = stable_draws(0.5, 100000, 7);
  const double d = ks_statistic_cdf(s, [](double x) { return std::erfc(0.5 / std::sqrt(x)); });
  EXPECT_LE(d, 0.01);
}

TEST(Stable, RejectsBadIndex) {
  RandomStream rng(1, 0);
  EXPECT_THROW(sample_stable(0.0, rng), ParameterDomainError);
  EXPECT_THROW(sample_stable(1.0, rng), ParameterDomainError);
}

TEST(MittagLeffler, Mean) {
  std::uint64_t seed = 300;
  for (double alpha : {0.25, 0.5, 0.75}) {
    std::vector<double> v(100000);
    for (std::size_t i = 0; i < v.size(); ++i) {
      RandomStream rng(seed, i);
      v[i] = sample_mittag_leffler(alpha, rng);
    }
    ++seed;
    const auto m = summarize(v);
    EXPECT_NEAR(m.mean, 1.0 / std::tgamma(1.0 + alpha), 4.0 * m.stderr_) << alpha;
  }
}

TEST(MittagLeffler, HalfIsHalfNormal) {
  // V = S^{-1/2} with S Levy: P(V <= v) = P(S >= v^-2) = erf(v / 2).
  std::vector<double> v(20000);
  for (std::size_t i = 0; i < v.size(); ++i) {
    RandomStream rng(9, i);
    v[i] = sample_mittag_leffler(0.5, rng);
  }
  const double d = ks_statistic_cdf(v, [](double x) { return std::erf(0.5 * x); });
  EXPECT_LT(d, 1.63 / std::sqrt(20000.0));
}

TEST(InverseSqrt, Identity) {
  Eigen::MatrixXd a(3, 3);
  a << 4, 1, 0.5, 1, 3, 0.2, 0.5, 0.2, 2;
  const Eigen::MatrixXd r = inverse_sqrt_spd(a);
  EXPECT_LT((r * a * r - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((r - r.transpose()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(LimitLaw, Validation) {
  LimitLawSpec law{0.5, Eigen::MatrixXd::Identity(2, 2)};
  EXPECT_NO_THROW(law.validate());
  law.alpha = 1.2;
  EXPECT_THROW(law.validate(), ParameterDomainError);
  law.alpha = 0.5;
  law.cov(1, 1) = -1.0;
  EXPECT_THROW(law.validate(), ParameterDomainError);
}

TEST(LimitLaw, SymmetricAndScaled) {
  Eigen::MatrixXd cov(2, 2);
  cov << 2.0, 0.5, 0.5, 1.0;
  const LimitErrorSampler sampler(LimitLawSpec{0.5, cov});
  const std::size_t n = 40000;
  std::vector<double> plus, minus, ratio;
  const Eigen::MatrixXd upper = cov.llt().matrixU();
  for (std::size_t i = 0; i < n; ++i) {
    RandomStream rng(55, i);
    const Eigen::VectorXd z = sampler.sample(rng);
    plus.push_back(z[0]);
    minus.push_back(-z[0]);
    // U z with U^T U = cov is again G / sqrt(V) up to rotation: coordinate ratio is Cauchy.
    const Eigen::VectorXd w = upper * z;
    ratio.push_back(w[0] / w[1]);
  }
  EXPECT_LT(ks_statistic(plus, minus), 1.63 * std::sqrt(2.0 / static_cast<double>(n)));
  const double d =
      ks_statistic_cdf(ratio, [](double x) { return 0.5 + std::atan(x) / std::numbers::pi; });
  EXPECT_LT(d, 1.63 / std::sqrt(static_cast<double>(n)));
}

TEST(LimitLaw, SelfSimilarMixture) {
  // G / sqrt(V) with the ratio of coordinates standard Cauchy regardless of V.
  const LimitErrorSampler sampler(LimitLawSpec{0.3, Eigen::MatrixXd::Identity(2, 2)});
  std::vector<double> ratio(20000);
  for (std::size_t i = 0; i < ratio.size(); ++i) {
    RandomStream rng(77, i);
    const Eigen::VectorXd z = sampler.sample(rng);
    ratio[i] = z[0] / z[1];
  }
  const double d =
      ks_statistic_cdf(ratio, [](double x) { return 0.5 + std::atan(x) / std::numbers::pi; });
  EXPECT_LT(d, 1.63 / std::sqrt(20000.0));
}

TEST(LimitLaw, FirstCoordinateIsNormalOverRootV) {
  // With cov = 1 the sampler must agree in law with an independently assembled G / sqrt(V).
  const LimitErrorSampler sampler(LimitLawSpec{0.5, Eigen::MatrixXd::Identity(1, 1)});
  std::vector<double> z(20000), v(20000);
  for (std::size_t i = 0; i < z.size(); ++i) {
    RandomStream a(88, i), b(89, i);
    z[i] = std::abs(sampler.sample(a)[0]);
    v[i] = sample_mittag_leffler(0.5, b);
  }
  std::vector<double> ref(z.size());
  for (std::size_t i = 0; i < ref.size(); ++i) {
    RandomStream c(90, i);
    ref[i] = std::abs(c.normal()) / std::sqrt(v[i]);
  }
  EXPECT_LT(ks_statistic(z, ref), 1.63 * std::sqrt(2.0 / 20000.0));
}

TEST(Loss, Values) {
  const Eigen::Vector2d x(1.0, 1.0);
  EXPECT_DOUBLE_EQ(Loss::from_name("truncated-quadratic", 4.0)(x), 2.0);
  EXPECT_DOUBLE_EQ(Loss::from_name("truncated-quadratic", 1.5)(x), 1.5);
  EXPECT_DOUBLE_EQ(Loss::from_name("exp-quadratic")(x), 1.0 - std::exp(-2.0));
  EXPECT_DOUBLE_EQ(Loss::from_name("constant", 3.0)(x), 3.0);
  EXPECT_THROW(Loss::from_name("hinge"), ConfigError);
}

TEST(LimitRisk, ConstantLossHasNoVariance) {
  const auto r = limit_risk(LimitLawSpec{0.5, Eigen::MatrixXd::Identity(2, 2)},
                            Loss::from_name("constant", 2.5), 1000, 4);
  EXPECT_EQ(r.mean, 2.5);
  EXPECT_EQ(r.stderr_, 0.0);
  EXPECT_EQ(r.n, 1000u);
}

TEST(LimitRisk, LargerInformationLowersRisk) {
  const auto loss = Loss::from_name("truncated-quadratic", 4.0);
  const auto small = limit_risk(LimitLawSpec{0.5, 4.0 * Eigen::MatrixXd::Identity(2, 2)}, loss, 20000, 6);
  const auto large = limit_risk(LimitLawSpec{0.5, Eigen::MatrixXd::Identity(2, 2)}, loss, 20000, 6);
  EXPECT_LT(small.mean, large.mean);
}
