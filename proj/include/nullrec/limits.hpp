#pragma once

#include "nullrec/rng.hpp"

#include <Eigen/Dense>

#include <string>
#include <string_view>

namespace nullrec {

/// One draw of the one-sided stable law with E exp(-z S) = exp(-z^alpha).
double sample_stable(double alpha, RandomStream& rng);

/// (1/S)^alpha for S = sample_stable(alpha): the time-1 marginal of the
/// Mittag-Leffler process, with E V = 1/Gamma(1 + alpha).
double sample_mittag_leffler(double alpha, RandomStream& rng);

struct LimitLawSpec {
  double alpha = 0.5;
  Eigen::MatrixXd cov;

  int dim() const { return static_cast<int>(cov.rows()); }
  /// Throws ParameterDomainError for alpha outside (0,1) or cov not symmetric
  /// positive definite.
  void validate() const;
};

/// Symmetric inverse square root through the eigendecomposition.
Eigen::MatrixXd inverse_sqrt_spd(const Eigen::MatrixXd& m);

/// Draws cov^{-1/2} G / sqrt(V): equal in law to cov^{-1/2} B(V)/V.
class LimitErrorSampler {
 public:
  explicit LimitErrorSampler(LimitLawSpec law);

  Eigen::VectorXd sample(RandomStream& rng) const;
  const LimitLawSpec& law() const { return law_; }
  const Eigen::MatrixXd& cov_inv_sqrt() const { return root_; }

 private:
  LimitLawSpec law_;
  Eigen::MatrixXd root_;
};

Eigen::VectorXd sample_limit_error(const LimitLawSpec& law, RandomStream& rng);

/// Bounded subconvex losses of |x|^2 plus the constant loss.
struct Loss {
  enum class Kind { truncated_quadratic, exp_quadratic, constant };
  Kind kind = Kind::truncated_quadratic;
  double c = 4.0;  // cap for truncated_quadratic, value for constant

  double operator()(const Eigen::VectorXd& x) const;
  std::string name() const;
  /// "truncated-quadratic", "exp-quadratic" or "constant".
  static Loss from_name(std::string_view name, double c = 4.0);
};

struct MonteCarloMean {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t n = 0;
};

/// Monte Carlo estimate of E loss(Z) for Z drawn from the limit law;
/// draw i uses RandomStream(seed, i).
MonteCarloMean limit_risk(const LimitLawSpec& law, const Loss& loss, std::size_t n,
                          std::uint64_t seed);

}  // namespace nullrec
