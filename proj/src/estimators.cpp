#include "nullrec/estimators.hpp"

#include "nullrec/errors.hpp"

#include <cmath>

namespace nullrec {
namespace {

void check_shape(const SufficientStats& stats) {
  if (stats.j.rows() != stats.y.size() || stats.j.cols() != stats.y.size()) {
    throw DimensionMismatch("statistics: y has " + std::to_string(stats.y.size()) +
                            " entries but j is " + std::to_string(stats.j.rows()) + "x" +
                            std::to_string(stats.j.cols()));
  }
}

void check_size(const SufficientStats& stats, const Eigen::VectorXd& v, const char* what) {
  if (v.size() != stats.y.size()) {
    throw DimensionMismatch(std::string(what) + " has " + std::to_string(v.size()) +
                            " entries, statistics have " + std::to_string(stats.y.size()));
  }
}

// Returns j^{-1} rhs when j passes the gate.
std::optional<Eigen::VectorXd> gated_solve(const Eigen::MatrixXd& j, const Eigen::VectorXd& rhs,
                                           double& min_eig) {
  if (!passes_pd_gate(j, &min_eig)) return std::nullopt;
  Eigen::LLT<Eigen::MatrixXd> llt(j);
  if (llt.info() != Eigen::Success) return std::nullopt;
  return llt.solve(rhs);
}

}  // namespace

bool passes_pd_gate(const Eigen::MatrixXd& j, double* min_eigenvalue) {
  if (j.size() == 0 || !j.allFinite()) {
    if (min_eigenvalue) *min_eigenvalue = 0.0;
    return false;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  if (min_eigenvalue) *min_eigenvalue = lmin;
  const double trace = j.trace();
  return trace > 0.0 && lmin > kPdTolerance * trace / static_cast<double>(j.rows());
}

EstimateResult mle(const SufficientStats& stats) {
  check_shape(stats);
  EstimateResult r;
  r.horizon = stats.t;
  const auto sol = gated_solve(stats.j, stats.y, r.conditioning);
  r.j_invertible = sol.has_value();
  r.theta_hat = sol.value_or(Eigen::VectorXd::Zero(stats.y.size()));
  return r;
}

EstimateResult restricted_mle(const SufficientStats& stats_a, double x0) {
  const Interval window = stats_a.window.value_or(Interval::whole_line());
  if (!window.has_interior_point(x0)) {
    throw PreconditionError("restricted estimator needs x0 = " + std::to_string(x0) +
                            " in the interior of the window [" + std::to_string(window.lo) +
                            ", " + std::to_string(window.hi) + "]");
  }
  return mle(stats_a);
}

double predicted_naive_bias(const ModelSpec& spec, const ParamVector& theta) {
  bool all_zero = true;
  for (double t : theta.theta2) all_zero = all_zero && t == 0.0;
  if (all_zero) {
    require_parameter_space(spec, theta);
    return 0.0;
  }
  const Eigen::MatrixXd m = mu_moment_matrix(spec, theta);
  double bias = 0.0;
  for (std::size_t nu = 0; nu < theta.theta2.size(); ++nu) {
    bias += theta.theta2[nu] * m(0, static_cast<Eigen::Index>(nu + 1));
  }
  return bias / m(0, 0);
}

NaiveEstimate naive_estimator(const SufficientStats& stats, const ModelSpec& spec,
                              const std::optional<ParamVector>& theta_true) {
  check_shape(stats);
  if (stats.y.size() < 1) throw DimensionMismatch("naive estimator needs a first coordinate");
  if (!(stats.j(0, 0) != 0.0)) throw DegenerateError("naive estimator: j_11 = 0");
  NaiveEstimate out;
  out.theta_check = stats.y[0] / stats.j(0, 0);
  if (theta_true) out.predicted_bias = predicted_naive_bias(spec, *theta_true);
  return out;
}

double log_likelihood_ratio(const SufficientStats& stats, const Eigen::VectorXd& theta_prime,
                            const Eigen::VectorXd& theta) {
  check_shape(stats);
  check_size(stats, theta_prime, "theta_prime");
  const Eigen::VectorXd d = theta_prime - theta;
  return d.dot(score_at(stats, theta)) - 0.5 * d.dot(stats.j * d);
}

double local_log_likelihood(const SufficientStats& stats, const Eigen::VectorXd& theta,
                            const Eigen::VectorXd& h, double delta) {
  check_shape(stats);
  check_size(stats, h, "h");
  const Eigen::VectorXd s = delta * score_at(stats, theta);
  const Eigen::MatrixXd jn = (delta * delta) * stats.j;
  return h.dot(s) - 0.5 * h.dot(jn * h);
}

EstimateResult one_step(const SufficientStats& stats, const Eigen::VectorXd& preliminary) {
  check_shape(stats);
  check_size(stats, preliminary, "preliminary");
  if (!preliminary.allFinite()) throw PreconditionError("one_step: preliminary estimate not finite");
  EstimateResult r;
  r.horizon = stats.t;
  const auto step = gated_solve(stats.j, score_at(stats, preliminary), r.conditioning);
  r.j_invertible = step.has_value();
  r.theta_hat = step ? Eigen::VectorXd(preliminary + *step) : preliminary;
  return r;
}

}  // namespace nullrec
