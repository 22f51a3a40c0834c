#include "nullrec/limits.hpp"

#include "nullrec/errors.hpp"
#include "nullrec/statistics.hpp"

#include <cmath>
#include <numbers>

namespace nullrec {
namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ParameterDomainError("alpha must lie in (0, 1), got " + std::to_string(alpha));
  }
}

}  // namespace

// Kanter's representation S = (A(U) / E)^((1-alpha)/alpha) with U ~ U(0, pi),
// E ~ Exp(1) and Zolotarev's function
//   A(u) = sin(alpha u)^(alpha/(1-alpha)) sin((1-alpha) u) / sin(u)^(1/(1-alpha)).
// It yields E exp(-z S) = exp(-z^alpha) with no further scale; the
// Chambers-Mallows-Stuck S(alpha, 1, gamma, 0) form would need
// gamma = cos(pi alpha / 2)^(1/alpha) to match. Evaluated in logs because
// A blows up near u = pi for small alpha.
double sample_stable(double alpha, RandomStream& rng) {
  check_alpha(alpha);
  const double u = std::numbers::pi * rng.uniform();
  const double e = rng.exponential();
  const double b = 1.0 - alpha;
  const double log_a = (alpha / b) * std::log(std::sin(alpha * u)) + std::log(std::sin(b * u)) -
                       std::log(std::sin(u)) / b;
  return std::exp((b / alpha) * (log_a - std::log(e)));
}

double sample_mittag_leffler(double alpha, RandomStream& rng) {
  return std::pow(sample_stable(alpha, rng), -alpha);
}

void LimitLawSpec::validate() const {
  check_alpha(alpha);
  if (cov.rows() < 1 || cov.rows() != cov.cols() || !cov.allFinite()) {
    throw ParameterDomainError("limit covariance must be a finite square matrix");
  }
  if (!cov.isApprox(cov.transpose(), 1e-12)) {
    throw ParameterDomainError("limit covariance is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov, Eigen::EigenvaluesOnly);
  if (!(es.eigenvalues().minCoeff() > 0.0)) {
    throw ParameterDomainError("limit covariance is not positive definite");
  }
}

Eigen::MatrixXd inverse_sqrt_spd(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() != Eigen::Success || !(es.eigenvalues().minCoeff() > 0.0)) {
    throw ParameterDomainError("matrix is not positive definite");
  }
  return es.eigenvectors() * es.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() *
         es.eigenvectors().transpose();
}

LimitErrorSampler::LimitErrorSampler(LimitLawSpec law) : law_(std::move(law)) {
  law_.validate();
  root_ = inverse_sqrt_spd(law_.cov);
}

Eigen::VectorXd LimitErrorSampler::sample(RandomStream& rng) const {
  const double v = sample_mittag_leffler(law_.alpha, rng);
  Eigen::VectorXd g(law_.dim());
  for (int i = 0; i < g.size(); ++i) g[i] = rng.normal();
  return root_ * g / std::sqrt(v);
}

Eigen::VectorXd sample_limit_error(const LimitLawSpec& law, RandomStream& rng) {
  return LimitErrorSampler(law).sample(rng);
}

double Loss::operator()(const Eigen::VectorXd& x) const {
  const double r2 = x.squaredNorm();
  switch (kind) {
    case Kind::truncated_quadratic:
      return std::min(r2, c);
    case Kind::exp_quadratic:
      return 1.0 - std::exp(-r2);
    case Kind::constant:
      return c;
  }
  return 0.0;
}

std::string Loss::name() const {
  switch (kind) {
    case Kind::truncated_quadratic:
      return "truncated-quadratic";
    case Kind::exp_quadratic:
      return "exp-quadratic";
    case Kind::constant:
      return "constant";
  }
  return "unknown";
}

Loss Loss::from_name(std::string_view name, double c) {
  Loss l;
  l.c = c;
  if (name == "truncated-quadratic") {
    if (!(c > 0.0)) throw ConfigError("truncated-quadratic loss needs a positive cap");
    l.kind = Kind::truncated_quadratic;
  } else if (name == "exp-quadratic") {
    l.kind = Kind::exp_quadratic;
  } else if (name == "constant") {
    l.kind = Kind::constant;
  } else {
    throw ConfigError("unknown loss '" + std::string(name) +
                      "' (expected truncated-quadratic, exp-quadratic or constant)");
  }
  return l;
}

MonteCarloMean limit_risk(const LimitLawSpec& law, const Loss& loss, std::size_t n,
                          std::uint64_t seed) {
  if (n < 2) throw PreconditionError("limit_risk needs at least two draws");
  const LimitErrorSampler sampler(law);
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) {
    RandomStream rng(seed, i);
    values[i] = loss(sampler.sample(rng));
  }
  const auto s = summarize(values);
  return {s.mean, s.stderr_, n};
}

}  // namespace nullrec
