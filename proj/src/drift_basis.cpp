#include "nullrec/drift_model.hpp"

#include "nullrec/errors.hpp"
#include "nullrec/quadrature.hpp"
#include "nullrec/special_functions.hpp"

#include <charconv>
#include <cmath>
#include <numbers>

namespace nullrec {
namespace {

double sinc(double x) {
  if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

// Antiderivative of f1(x) cos(kx) (even) or f1(x) sin(kx) (odd) from 0.
// Exact panel sums on [0, kTableEnd]; beyond that the tail
// int_x^inf f1(y) trig(ky) dy is written through Si/Ci plus the first
// integration-by-parts term of the remainder 1/(y(1+y^2)), which is O(x^-4).
class FourierAntiderivative {
 public:
  static constexpr double kTableEnd = 1e4;
  static constexpr double kStep = 0.5;

  FourierAntiderivative(int k, bool cosine) : k_(k), cosine_(cosine) {
    const auto n = static_cast<std::size_t>(kTableEnd / kStep);
    cumulative_.resize(n + 1);
    cumulative_[0] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double a = static_cast<double>(i) * kStep;
      cumulative_[i + 1] = cumulative_[i] + quad::kronrod15(integrand(), a, a + kStep);
    }
    const double x = kTableEnd;
    limit_ = cumulative_.back() - tail(x);
  }

  double operator()(double x) const {
    const double ax = std::abs(x);
    double value;
    if (ax <= kTableEnd) {
      const auto i = static_cast<std::size_t>(ax / kStep);
      const double a = static_cast<double>(i) * kStep;
      value = cumulative_[std::min(i, cumulative_.size() - 1)];
      if (ax > a) value += quad::kronrod15(integrand(), a, ax);
    } else {
      value = limit_ + tail(ax);
    }
    // f1 cos is odd so its antiderivative is even; f1 sin is even, antiderivative odd.
    if (x < 0.0 && !cosine_) return -value;
    return value;
  }

  // F(+inf); F(-inf) follows from parity.
  double limit() const { return limit_; }

 private:
  std::function<double(double)> integrand() const {
    const double k = k_;
    if (cosine_) return [k](double y) { return principal_function(y) * std::cos(k * y); };
    return [k](double y) { return principal_function(y) * std::sin(k * y); };
  }

  // F(x) - F(inf) = -int_x^inf f for x > 0 large.
  double tail(double x) const {
    const double k = k_;
    const double g = 1.0 / (x * (1.0 + x * x));
    if (cosine_) {
      return special::cosine_integral(k * x) - g * std::sin(k * x) / k;
    }
    return -(std::numbers::pi / 2.0 - special::sine_integral(k * x)) + g * std::cos(k * x) / k;
  }

  int k_;
  bool cosine_;
  std::vector<double> cumulative_;
  double limit_ = 0.0;
};

}  // namespace

struct DriftBasis::Impl {
  enum class Kind { none, sinc, fourier, custom };
  Kind kind = Kind::none;
  std::string name;
  int order = 0;
  std::vector<Component> components;
};

DriftBasis::DriftBasis(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

DriftBasis DriftBasis::none() {
  auto impl = std::make_shared<Impl>();
  impl->kind = Impl::Kind::none;
  impl->name = "none";
  return DriftBasis(std::move(impl));
}

DriftBasis DriftBasis::sinc() {
  auto impl = std::make_shared<Impl>();
  impl->kind = Impl::Kind::sinc;
  impl->name = "sinc";
  Component c;
  c.f = [](double x) { return nullrec::sinc(x); };
  c.antiderivative = [](double x) { return special::sine_integral(x); };
  c.limit_pos = std::numbers::pi / 2.0;
  c.limit_neg = -std::numbers::pi / 2.0;
  impl->components.push_back(std::move(c));
  return DriftBasis(std::move(impl));
}

DriftBasis DriftBasis::fourier(int order) {
  if (order < 1) throw ConfigError("fourier basis needs order >= 1");
  auto impl = std::make_shared<Impl>();
  impl->kind = Impl::Kind::fourier;
  impl->name = "fourier-" + std::to_string(order);
  impl->order = order;
  for (int k = 1; k <= order; ++k) {
    for (const bool cosine : {true, false}) {
      auto anti = std::make_shared<const FourierAntiderivative>(k, cosine);
      Component c;
      const double kk = k;
      if (cosine) {
        c.f = [kk](double x) { return principal_function(x) * std::cos(kk * x); };
      } else {
        c.f = [kk](double x) { return principal_function(x) * std::sin(kk * x); };
      }
      c.antiderivative = [anti](double x) { return (*anti)(x); };
      c.limit_pos = anti->limit();
      c.limit_neg = cosine ? anti->limit() : -anti->limit();
      impl->components.push_back(std::move(c));
    }
  }
  return DriftBasis(std::move(impl));
}

DriftBasis DriftBasis::from_name(std::string_view name) {
  if (name == "none") return none();
  if (name == "sinc") return sinc();
  constexpr std::string_view prefix = "fourier-";
  if (name.starts_with(prefix)) {
    const std::string_view digits = name.substr(prefix.size());
    int order = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), order);
    if (ec == std::errc() && ptr == digits.data() + digits.size() && order >= 1) {
      return fourier(order);
    }
  }
  throw ConfigError("unknown drift basis '" + std::string(name) +
                    "' (expected none, sinc or fourier-<order>)");
}

DriftBasis DriftBasis::custom(std::string name, std::vector<Component> components) {
  auto impl = std::make_shared<Impl>();
  impl->kind = Impl::Kind::custom;
  impl->name = std::move(name);
  for (auto& c : components) {
    if (!c.f) throw ConfigError("custom basis component without a function");
    if (!c.antiderivative) {
      auto f = c.f;
      c.antiderivative = [f](double x) {
        if (x == 0.0) return 0.0;
        const double lo = std::min(0.0, x);
        const double hi = std::max(0.0, x);
        const auto bp = quad::panel_breakpoints(lo, hi);
        const double v = quad::integrate(f, bp, {.abs_tol = 1e-13, .rel_tol = 1e-12});
        return x < 0.0 ? -v : v;
      };
    }
    // Far-field value as a stand-in for the limit; accurate to the decay of f.
    constexpr double kFar = 1e6;
    if (std::isnan(c.limit_pos)) c.limit_pos = c.antiderivative(kFar);
    if (std::isnan(c.limit_neg)) c.limit_neg = c.antiderivative(-kFar);
    if (!std::isfinite(c.limit_pos) || !std::isfinite(c.limit_neg)) {
      throw ConfigError("custom basis antiderivative has no finite limit");
    }
  }
  impl->components = std::move(components);
  return DriftBasis(std::move(impl));
}

const std::string& DriftBasis::name() const { return impl_->name; }

std::size_t DriftBasis::size() const { return impl_->components.size(); }

double DriftBasis::eval(std::size_t nu, double x) const {
  return impl_->components.at(nu).f(x);
}

double DriftBasis::antiderivative(std::size_t nu, double x) const {
  return impl_->components.at(nu).antiderivative(x);
}

double DriftBasis::limit_pos(std::size_t nu) const { return impl_->components.at(nu).limit_pos; }

double DriftBasis::limit_neg(std::size_t nu) const { return impl_->components.at(nu).limit_neg; }

void DriftBasis::eval_psi(double x, std::span<double> out) const {
  const double f1 = principal_function(x);
  out[0] = f1;
  switch (impl_->kind) {
    case Impl::Kind::none:
      return;
    case Impl::Kind::sinc:
      out[1] = nullrec::sinc(x);
      return;
    case Impl::Kind::fourier: {
      const double c1 = std::cos(x);
      const double s1 = std::sin(x);
      double ck = c1;
      double sk = s1;
      for (int k = 0; k < impl_->order; ++k) {
        out[1 + 2 * k] = f1 * ck;
        out[2 + 2 * k] = f1 * sk;
        const double cn = ck * c1 - sk * s1;
        sk = sk * c1 + ck * s1;
        ck = cn;
      }
      return;
    }
    case Impl::Kind::custom:
      for (std::size_t nu = 0; nu < impl_->components.size(); ++nu) {
        out[1 + nu] = impl_->components[nu].f(x);
      }
      return;
  }
}

}  // namespace nullrec
