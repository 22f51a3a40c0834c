#include "nullrec/drift_model.hpp"

#include "nullrec/errors.hpp"
#include "nullrec/quadrature.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <cmath>
#include <sstream>

namespace nullrec {
namespace {

// Unit-width panels cover [-kInner, kInner]; beyond it the integrand of any
// basis satisfying the decay condition behaves like c |x|^(lambda1 - 2).
constexpr double kInner = 1e4;

constexpr quad::Options kMuOptions{.abs_tol = 1e-14, .rel_tol = 1e-12, .max_intervals = 2000000};

double lambda_of(double theta, double sigma) { return 2.0 * theta / (sigma * sigma); }

double weighted_antiderivative_sum(const ModelSpec& spec, const ParamVector& theta, double x) {
  double sum = 0.0;
  for (std::size_t nu = 0; nu < spec.basis.size(); ++nu) {
    if (theta.theta2[nu] == 0.0) continue;
    sum += lambda_of(theta.theta2[nu], spec.sigma) * spec.basis.antiderivative(nu, x);
  }
  return sum;
}

bool is_zero(const ParamVector& theta) {
  if (theta.theta1 != 0.0) return false;
  for (double t : theta.theta2) {
    if (t != 0.0) return false;
  }
  return true;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

bool Interval::is_compact() const { return std::isfinite(lo) && std::isfinite(hi) && lo <= hi; }

bool Interval::is_whole_line() const { return std::isinf(lo) && lo < 0 && std::isinf(hi) && hi > 0; }

void ModelSpec::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ParameterDomainError("sigma must be positive and finite, got " + fmt(sigma));
  }
  if (!std::isfinite(x0)) throw ParameterDomainError("x0 must be finite");
}

Eigen::VectorXd ParamVector::to_vector() const {
  Eigen::VectorXd v(1 + theta2.size());
  v[0] = theta1;
  for (std::size_t i = 0; i < theta2.size(); ++i) v[static_cast<Eigen::Index>(i + 1)] = theta2[i];
  return v;
}

ParamVector ParamVector::from_vector(const Eigen::VectorXd& v) {
  if (v.size() < 1) throw DimensionMismatch("parameter vector must have at least one entry");
  ParamVector p;
  p.theta1 = v[0];
  p.theta2.assign(v.data() + 1, v.data() + v.size());
  return p;
}

std::string_view to_string(Recurrence r) {
  switch (r) {
    case Recurrence::transient:
      return "transient";
    case Recurrence::null_recurrent:
      return "null_recurrent";
    case Recurrence::positive_recurrent:
      return "positive_recurrent";
  }
  return "unknown";
}

bool in_parameter_space(const ModelSpec& spec, const ParamVector& theta) {
  if (!(spec.sigma > 0.0) || theta.theta2.size() != spec.basis.size()) return false;
  const double bound = 0.5 * spec.sigma * spec.sigma;
  if (!std::isfinite(theta.theta1) || !(std::abs(theta.theta1) < bound)) return false;
  for (double t : theta.theta2) {
    if (!std::isfinite(t)) return false;
  }
  return true;
}

void require_parameter_space(const ModelSpec& spec, const ParamVector& theta) {
  spec.validate();
  if (theta.theta2.size() != spec.basis.size()) {
    throw DimensionMismatch("theta2 has " + std::to_string(theta.theta2.size()) +
                            " entries but basis '" + spec.basis.name() + "' has " +
                            std::to_string(spec.basis.size()));
  }
  if (!in_parameter_space(spec, theta)) {
    throw ParameterDomainError("theta1 = " + fmt(theta.theta1) + " outside (-sigma^2/2, sigma^2/2) = (" +
                               fmt(-0.5 * spec.sigma * spec.sigma) + ", " +
                               fmt(0.5 * spec.sigma * spec.sigma) + ") or theta2 not finite");
  }
}

double eval_drift(const ModelSpec& spec, const ParamVector& theta, double x) {
  double b = theta.theta1 * principal_function(x);
  for (std::size_t nu = 0; nu < spec.basis.size(); ++nu) {
    b += theta.theta2.at(nu) * spec.basis.eval(nu, x);
  }
  return b;
}

double antiderivative_F(const ModelSpec& spec, std::size_t nu, double x) {
  if (nu >= spec.basis.size()) {
    throw DimensionMismatch("basis index " + std::to_string(nu) + " out of range");
  }
  return spec.basis.antiderivative(nu, x);
}

double scale_density(const ModelSpec& spec, const ParamVector& theta, double x) {
  const double l1 = lambda_of(theta.theta1, spec.sigma);
  return std::pow(1.0 + x * x, -0.5 * l1) * std::exp(-weighted_antiderivative_sum(spec, theta, x));
}

double invariant_density(const ModelSpec& spec, const ParamVector& theta, double x) {
  const double l1 = lambda_of(theta.theta1, spec.sigma);
  return std::pow(1.0 + x * x, 0.5 * l1) * std::exp(weighted_antiderivative_sum(spec, theta, x)) /
         (spec.sigma * spec.sigma);
}

double scale_function(const ModelSpec& spec, const ParamVector& theta, double x) {
  require_parameter_space(spec, theta);
  if (x == 0.0 || is_zero(theta)) return x;
  const auto bp = quad::panel_breakpoints(std::min(0.0, x), std::max(0.0, x), kInner);
  const double v = quad::integrate([&](double y) { return scale_density(spec, theta, y); }, bp,
                                   {.abs_tol = 1e-15, .rel_tol = 1e-13, .max_intervals = 1000000});
  return x < 0.0 ? -v : v;
}

double scale_inverse(const ModelSpec& spec, const ParamVector& theta, double u) {
  require_parameter_space(spec, theta);
  if (u == 0.0 || is_zero(theta)) return u;
  const double sign = u > 0.0 ? 1.0 : -1.0;
  auto f = [&](double x) { return scale_function(spec, theta, x) - u; };
  // S grows like |x|^(1 - lambda1), so doubling brackets the root quickly.
  double lo = 0.0;
  double flo = -u;
  double hi = sign;
  double fhi = f(hi);
  while (sign * fhi < 0.0) {
    lo = hi;
    flo = fhi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw Error("scale_inverse: bracket expansion overflowed");
    fhi = f(hi);
  }
  if (fhi == 0.0) return hi;
  auto tol = [](double a, double b) {
    return std::abs(b - a) <= std::max(1e-10, 4.0 * std::numeric_limits<double>::epsilon() *
                                                  std::max(std::abs(a), std::abs(b)));
  };
  boost::uintmax_t max_iter = 200;
  std::pair<double, double> r;
  if (lo < hi) {
    r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, max_iter);
  } else {
    r = boost::math::tools::toms748_solve(f, hi, lo, fhi, flo, tol, max_iter);
  }
  return 0.5 * (r.first + r.second);
}

AsymptoticConstants asymptotic_constants(const ModelSpec& spec, const ParamVector& theta) {
  require_parameter_space(spec, theta);
  AsymptoticConstants c;
  const double s2 = spec.sigma * spec.sigma;
  c.lambda1 = lambda_of(theta.theta1, spec.sigma);
  double log_plus = 0.0;
  double log_minus = 0.0;
  for (std::size_t nu = 0; nu < spec.basis.size(); ++nu) {
    const double l2 = lambda_of(theta.theta2[nu], spec.sigma);
    c.lambda2.push_back(l2);
    log_plus += l2 * spec.basis.limit_pos(nu);
    log_minus += l2 * spec.basis.limit_neg(nu);
  }
  c.alpha = 0.5 * (1.0 - c.lambda1);
  c.psi_plus = std::exp(log_plus);
  c.psi_minus = std::exp(log_minus);
  c.d_weight = std::pow(2.0 * s2, 1.0 + c.alpha) * std::tgamma(c.alpha) /
               (2.0 * std::tgamma(1.0 - c.alpha));
  if (!std::isfinite(c.psi_plus) || !std::isfinite(c.psi_minus) || !std::isfinite(c.d_weight)) {
    throw ParameterDomainError("asymptotic constants overflow for " + describe(theta));
  }
  return c;
}

Norming norming(const ModelSpec& spec, const ParamVector& theta, double n) {
  if (!(n >= 1.0)) throw PreconditionError("norming needs n >= 1, got " + fmt(n));
  const auto c = asymptotic_constants(spec, theta);
  Norming out;
  out.alpha_n = std::pow(n, c.alpha) * c.d_weight / (c.psi_plus + c.psi_minus);
  out.delta_n = std::pow(n, -0.5 * c.alpha);
  return out;
}

Eigen::VectorXd mu_integral(const ModelSpec& spec, const ParamVector& theta, int dim,
                            const std::function<void(double, Eigen::Ref<Eigen::VectorXd>)>& g,
                            std::optional<Interval> window) {
  require_parameter_space(spec, theta);
  const Interval w = window.value_or(Interval::whole_line());
  if (!(w.hi > w.lo)) throw DegenerateError("window has empty interior");

  const double lambda1 = lambda_of(theta.theta1, spec.sigma);
  quad::VectorIntegrand integrand = [&](double x, Eigen::Ref<Eigen::VectorXd> out) {
    g(x, out);
    out *= invariant_density(spec, theta, x);
  };
  auto run = [&](double a, double b) -> Eigen::VectorXd {
    if (!(b > a)) return Eigen::VectorXd::Zero(dim);
    const double inner = std::max({kInner, std::abs(a), std::abs(b)});
    const auto bp = quad::panel_breakpoints(a, b, std::min(inner, 4.0 * kInner));
    return quad::integrate(integrand, dim, bp, kMuOptions).value;
  };

  // An infinite side is cut at R; the octave [R/2, R] calibrates the
  // power-law tail beyond R: int_R^inf = I_octave / (2^(1 - lambda1) - 1).
  const double tail_factor = 1.0 / (std::pow(2.0, 1.0 - lambda1) - 1.0);
  Eigen::VectorXd total = Eigen::VectorXd::Zero(dim);
  double a = w.lo;
  double b = w.hi;
  if (std::isinf(w.hi)) {
    const double r = std::max(kInner, 2.0 * std::max(0.0, w.lo) + 2.0);
    const Eigen::VectorXd octave = run(r / 2.0, r);
    total += octave + octave * tail_factor;
    b = r / 2.0;
  }
  if (std::isinf(w.lo)) {
    const double l = std::max(kInner, 2.0 * std::max(0.0, -w.hi) + 2.0);
    const Eigen::VectorXd octave = run(-l, -l / 2.0);
    total += octave + octave * tail_factor;
    a = -l / 2.0;
  }
  total += run(a, b);
  return total;
}

Eigen::MatrixXd mu_moment_matrix(const ModelSpec& spec, const ParamVector& theta,
                                 std::optional<Interval> window) {
  const auto d = static_cast<int>(spec.dim());
  const int packed = d * (d + 1) / 2;
  std::vector<double> psi(static_cast<std::size_t>(d));
  auto products = [&](double x, Eigen::Ref<Eigen::VectorXd> out) {
    spec.basis.eval_psi(x, psi);
    int idx = 0;
    for (int i = 0; i < d; ++i) {
      for (int j = i; j < d; ++j) out[idx++] = psi[static_cast<std::size_t>(i)] * psi[static_cast<std::size_t>(j)];
    }
  };
  const Eigen::VectorXd v = mu_integral(spec, theta, packed, products, window);
  const double s4 = std::pow(spec.sigma, 4);
  Eigen::MatrixXd m(d, d);
  int idx = 0;
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      m(i, j) = v[idx] / s4;
      m(j, i) = m(i, j);
      ++idx;
    }
  }
  return m;
}

Eigen::MatrixXd scaled_information(const ModelSpec& spec, const ParamVector& theta) {
  const auto c = asymptotic_constants(spec, theta);
  return (c.d_weight / (c.psi_plus + c.psi_minus)) * mu_moment_matrix(spec, theta);
}

double lifecycle_tail_constant(const ModelSpec& spec, const ParamVector& theta) {
  const auto c = asymptotic_constants(spec, theta);
  const double s2 = spec.sigma * spec.sigma;
  return std::pow(1.0 / (2.0 * s2), c.alpha) * 2.0 * (c.psi_plus + c.psi_minus) /
         std::tgamma(c.alpha);
}

Recurrence classify_recurrence(const ModelSpec& spec, double theta1) {
  spec.validate();
  const double l1 = lambda_of(theta1, spec.sigma);
  if (l1 > 1.0) return Recurrence::transient;
  if (l1 < -1.0) return Recurrence::positive_recurrent;
  return Recurrence::null_recurrent;
}

std::string describe(const ModelSpec& spec) {
  return "basis=" + spec.basis.name() + ";sigma=" + fmt(spec.sigma) + ";x0=" + fmt(spec.x0);
}

std::string describe(const ParamVector& theta) {
  std::string s = "theta1=" + fmt(theta.theta1) + ";theta2=[";
  for (std::size_t i = 0; i < theta.theta2.size(); ++i) {
    if (i) s += ",";
    s += fmt(theta.theta2[i]);
  }
  return s + "]";
}

}  // namespace nullrec
