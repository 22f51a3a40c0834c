#pragma once

#include "nullrec/drift_model.hpp"
#include "nullrec/simulator.hpp"

#include <Eigen/Dense>

#include <optional>

namespace nullrec {

/// Relative tolerance of the positive-definiteness gate: j is accepted when its
/// smallest eigenvalue exceeds kPdTolerance * trace(j) / dim.
inline constexpr double kPdTolerance = 1e-10;

struct EstimateResult {
  Eigen::VectorXd theta_hat;
  bool j_invertible = false;
  double conditioning = 0.0;  // smallest eigenvalue of j
  double horizon = 0.0;
};

struct NaiveEstimate {
  double theta_check = 0.0;
  std::optional<double> predicted_bias;
};

/// Gate for the set of strictly positive definite matrices. Writes the
/// smallest eigenvalue to min_eigenvalue when given.
bool passes_pd_gate(const Eigen::MatrixXd& j, double* min_eigenvalue = nullptr);

/// 1{j in D+} j^{-1} y.
EstimateResult mle(const SufficientStats& stats);

/// Same solve on windowed statistics; x0 must be an interior point of the window.
EstimateResult restricted_mle(const SufficientStats& stats_a, double x0);

/// y_1 / j_11, optionally with the almost-sure limit of its bias at theta_true:
/// sum_nu theta2_nu mu(f1 f2_nu) / mu(f1^2).
NaiveEstimate naive_estimator(const SufficientStats& stats, const ModelSpec& spec,
                              const std::optional<ParamVector>& theta_true = std::nullopt);

double predicted_naive_bias(const ModelSpec& spec, const ParamVector& theta);

/// (t' - t)^T S(t) - 1/2 (t' - t)^T j (t' - t) with S(t) = y - j t.
double log_likelihood_ratio(const SufficientStats& stats, const Eigen::VectorXd& theta_prime,
                            const Eigen::VectorXd& theta);

/// Log-likelihood ratio at theta + delta h against theta in the local form
/// h^T (delta S(theta)) - 1/2 h^T (delta^2 j) h.
double local_log_likelihood(const SufficientStats& stats, const Eigen::VectorXd& theta,
                            const Eigen::VectorXd& h, double delta);

/// preliminary + 1{j in D+} j^{-1} (y - j preliminary).
EstimateResult one_step(const SufficientStats& stats, const Eigen::VectorXd& preliminary);

}  // namespace nullrec
