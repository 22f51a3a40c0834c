#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nullrec {

/// Closed interval [lo, hi]; either end may be infinite.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  static Interval whole_line() { return {}; }
  bool contains(double x) const { return x >= lo && x <= hi; }
  bool has_interior_point(double x) const { return x > lo && x < hi; }
  bool is_compact() const;
  bool is_whole_line() const;
  bool operator==(const Interval&) const = default;
};

/// The principal drift function f1(x) = x / (1 + x^2).
inline double principal_function(double x) { return x / (1.0 + x * x); }

/// The secondary drift functions f_{2,1}..f_{2,m} together with their
/// antiderivatives from 0 and the limits of those antiderivatives at +-inf.
/// Immutable after construction; copies share state.
class DriftBasis {
 public:
  using Function = std::function<double(double)>;

  struct Component {
    Function f;
    Function antiderivative;  // empty: adaptive quadrature on [0, x]
    double limit_pos = std::numeric_limits<double>::quiet_NaN();  // NaN: computed numerically
    double limit_neg = std::numeric_limits<double>::quiet_NaN();
  };

  /// m = 0: drift theta1 * f1 only.
  static DriftBasis none();
  /// m = 1: f2(x) = sin(x)/x.
  static DriftBasis sinc();
  /// m = 2*order: f1(x)cos(kx), f1(x)sin(kx) for k = 1..order, in that interleaved order.
  static DriftBasis fourier(int order);
  /// "none", "sinc" or "fourier-<order>".
  static DriftBasis from_name(std::string_view name);
  /// Caller-supplied functions. The caller asserts boundedness, the Lipschitz
  /// property and finite limits of the antiderivatives.
  static DriftBasis custom(std::string name, std::vector<Component> components);

  const std::string& name() const;
  std::size_t size() const;

  /// f_{2,nu}(x), nu zero-based.
  double eval(std::size_t nu, double x) const;
  /// F_{2,nu}(x) = int_0^x f_{2,nu}(y) dy, nu zero-based.
  double antiderivative(std::size_t nu, double x) const;
  double limit_pos(std::size_t nu) const;
  double limit_neg(std::size_t nu) const;

  /// psi(x) = (f1(x), f_{2,1}(x), ..., f_{2,m}(x)); out.size() must be 1 + m.
  void eval_psi(double x, std::span<double> out) const;

  struct Impl;

 private:
  explicit DriftBasis(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;
};

struct ModelSpec {
  double sigma = 1.0;
  DriftBasis basis = DriftBasis::none();
  double x0 = 0.0;

  std::size_t dim() const { return 1 + basis.size(); }
  /// Throws ParameterDomainError unless sigma > 0 and x0 finite.
  void validate() const;
};

struct ParamVector {
  double theta1 = 0.0;
  std::vector<double> theta2;

  Eigen::VectorXd to_vector() const;
  static ParamVector from_vector(const Eigen::VectorXd& v);
  bool operator==(const ParamVector&) const = default;
};

struct AsymptoticConstants {
  double lambda1 = 0.0;
  std::vector<double> lambda2;
  double alpha = 0.5;
  double psi_plus = 1.0;
  double psi_minus = 1.0;
  double d_weight = 0.0;
};

struct Norming {
  double alpha_n = 0.0;
  double delta_n = 0.0;
};

enum class Recurrence { transient, null_recurrent, positive_recurrent };

std::string_view to_string(Recurrence r);

/// theta1 in (-sigma^2/2, sigma^2/2), theta2 finite with the basis dimension.
bool in_parameter_space(const ModelSpec& spec, const ParamVector& theta);
/// Throws ParameterDomainError / DimensionMismatch when theta is not admissible.
void require_parameter_space(const ModelSpec& spec, const ParamVector& theta);

double eval_drift(const ModelSpec& spec, const ParamVector& theta, double x);

/// F_{2,nu}(x), nu zero-based.
double antiderivative_F(const ModelSpec& spec, std::size_t nu, double x);

/// s(x) = (1+x^2)^(-lambda1/2) exp(-sum lambda2 F(x)).
double scale_density(const ModelSpec& spec, const ParamVector& theta, double x);
/// S(x) = int_0^x s(y) dy; a strictly increasing bijection of the real line.
double scale_function(const ModelSpec& spec, const ParamVector& theta, double x);
/// Unique root of S(x) = u, to absolute tolerance 1e-10.
double scale_inverse(const ModelSpec& spec, const ParamVector& theta, double u);

/// Lebesgue density of the invariant measure, (1/sigma^2)(1+x^2)^(lambda1/2) exp(sum lambda2 F(x)).
double invariant_density(const ModelSpec& spec, const ParamVector& theta, double x);

AsymptoticConstants asymptotic_constants(const ModelSpec& spec, const ParamVector& theta);

/// alpha_n = n^alpha D / (Psi+ + Psi-), delta_n = n^(-alpha/2).
Norming norming(const ModelSpec& spec, const ParamVector& theta, double n);

/// Limit information matrix (1/sigma^4) mu(psi psi^T 1_A). Without a window
/// the integral runs over the whole line.
Eigen::MatrixXd mu_moment_matrix(const ModelSpec& spec, const ParamVector& theta,
                                 std::optional<Interval> window = std::nullopt);

/// D / (Psi+ + Psi-) times the limit information matrix: the covariance of the
/// limiting local experiment.
Eigen::MatrixXd scaled_information(const ModelSpec& spec, const ParamVector& theta);

/// mu(g 1_A) for a vector of functions g (dim components).
Eigen::VectorXd mu_integral(const ModelSpec& spec, const ParamVector& theta, int dim,
                            const std::function<void(double, Eigen::Ref<Eigen::VectorXd>)>& g,
                            std::optional<Interval> window = std::nullopt);

/// Constant c in P(cycle duration > t) ~ c t^(-alpha):
/// (1/Gamma(alpha)) (1/(2 sigma^2))^alpha 2 (Psi+ + Psi-).
double lifecycle_tail_constant(const ModelSpec& spec, const ParamVector& theta);

Recurrence classify_recurrence(const ModelSpec& spec, double theta1);

std::string describe(const ModelSpec& spec);
std::string describe(const ParamVector& theta);

}  // namespace nullrec
