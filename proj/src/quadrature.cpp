#include "nullrec/quadrature.hpp"

#include "nullrec/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

namespace nullrec::quad {
namespace {

// QUADPACK qk15 abscissae and weights.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a = 0.0;
  double b = 0.0;
  Eigen::VectorXd value;
  double error = 0.0;
  bool operator<(const Panel& other) const { return error < other.error; }
};

class Kronrod {
 public:
  Kronrod(const VectorIntegrand& f, int dim)
      : f_(f), dim_(dim), fc_(dim), resg_(dim), resk_(dim), resabs_(dim),
        resasc_(dim) {
    fv1_.assign(7, Eigen::VectorXd(dim));
    fv2_.assign(7, Eigen::VectorXd(dim));
  }

  Panel operator()(double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    f_(center, fc_);
    resg_ = fc_ * kWg[3];
    resk_ = fc_ * kWgk[7];
    resabs_ = resk_.cwiseAbs();
    for (int j = 0; j < 7; ++j) {
      const double dx = half * kXgk[j];
      f_(center - dx, fv1_[j]);
      f_(center + dx, fv2_[j]);
      const Eigen::VectorXd sum = fv1_[j] + fv2_[j];
      resk_ += kWgk[j] * sum;
      resabs_ += kWgk[j] * (fv1_[j].cwiseAbs() + fv2_[j].cwiseAbs());
      if (j % 2 == 1) resg_ += kWg[j / 2] * sum;
    }
    evaluations_ += 15;
    const Eigen::VectorXd reskh = resk_ * 0.5;
    resasc_ = kWgk[7] * (fc_ - reskh).cwiseAbs();
    for (int j = 0; j < 7; ++j) {
      resasc_ += kWgk[j] * ((fv1_[j] - reskh).cwiseAbs() + (fv2_[j] - reskh).cwiseAbs());
    }
    Panel p;
    p.a = a;
    p.b = b;
    p.value = resk_ * half;
    double err = 0.0;
    const double eps = std::numeric_limits<double>::epsilon();
    for (int i = 0; i < dim_; ++i) {
      const double asc = resasc_[i] * std::abs(half);
      const double absval = resabs_[i] * std::abs(half);
      double e = std::abs((resk_[i] - resg_[i]) * half);
      if (asc != 0.0 && e != 0.0) e = asc * std::min(1.0, std::pow(200.0 * e / asc, 1.5));
      if (absval > std::numeric_limits<double>::min() / (50.0 * eps)) {
        e = std::max(50.0 * eps * absval, e);
      }
      if (!std::isfinite(resk_[i])) e = std::numeric_limits<double>::infinity();
      err = std::max(err, e);
    }
    p.error = err;
    return p;
  }

  int evaluations() const { return evaluations_; }

 private:
  const VectorIntegrand& f_;
  int dim_;
  Eigen::VectorXd fc_, resg_, resk_, resabs_, resasc_;
  std::vector<Eigen::VectorXd> fv1_, fv2_;
  int evaluations_ = 0;
};

}  // namespace

Result integrate(const VectorIntegrand& f, int dim, std::span<const double> breakpoints,
                 const Options& opts) {
  Result out;
  out.value = Eigen::VectorXd::Zero(dim);
  if (breakpoints.size() < 2) return out;

  Kronrod rule(f, dim);
  std::priority_queue<Panel> queue;
  Eigen::VectorXd total = Eigen::VectorXd::Zero(dim);
  double total_err = 0.0;
  // Panels too narrow to bisect again; their error is kept but never refined.
  Eigen::VectorXd frozen = Eigen::VectorXd::Zero(dim);
  double frozen_err = 0.0;

  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const double a = breakpoints[i];
    const double b = breakpoints[i + 1];
    if (!(b > a)) continue;
    Panel p = rule(a, b);
    total += p.value;
    total_err += p.error;
    queue.push(std::move(p));
  }

  auto target = [&] {
    return std::max(opts.abs_tol, opts.rel_tol * (total + frozen).cwiseAbs().maxCoeff());
  };

  int intervals = static_cast<int>(queue.size());
  while (!queue.empty() && total_err + frozen_err > target()) {
    if (intervals >= opts.max_intervals) {
      std::ostringstream msg;
      msg << "adaptive quadrature did not converge: error estimate " << total_err + frozen_err
          << " after " << intervals << " intervals";
      throw QuadratureError(msg.str());
    }
    Panel worst = queue.top();
    queue.pop();
    total -= worst.value;
    total_err -= worst.error;
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b) ||
        (worst.b - worst.a) < 1e-14 * std::max(1.0, std::abs(mid))) {
      frozen += worst.value;
      frozen_err += worst.error;
      continue;
    }
    Panel left = rule(worst.a, mid);
    Panel right = rule(mid, worst.b);
    total += left.value + right.value;
    total_err += left.error + right.error;
    queue.push(std::move(left));
    queue.push(std::move(right));
    ++intervals;
  }
  // Resum from scratch to shed the drift of repeated add/subtract.
  Eigen::VectorXd sum = frozen;
  double err = frozen_err;
  while (!queue.empty()) {
    sum += queue.top().value;
    err += queue.top().error;
    queue.pop();
  }
  if (!sum.allFinite()) throw QuadratureError("adaptive quadrature produced a non-finite value");
  if (err > target() * 10.0 && err > opts.abs_tol * 10.0) {
    std::ostringstream msg;
    msg << "adaptive quadrature stalled on unrefinable panels: error estimate " << err;
    throw QuadratureError(msg.str());
  }
  out.value = sum;
  out.error = err;
  out.evaluations = rule.evaluations();
  return out;
}

double integrate(const std::function<double(double)>& f, std::span<const double> breakpoints,
                 const Options& opts) {
  VectorIntegrand g = [&f](double x, Eigen::Ref<Eigen::VectorXd> out) { out[0] = f(x); };
  return integrate(g, 1, breakpoints, opts).value[0];
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 const Options& opts) {
  if (a == b) return 0.0;
  if (a > b) return -integrate(f, b, a, opts);
  const std::array<double, 2> bp = {a, b};
  return integrate(f, std::span<const double>(bp), opts);
}

double kronrod15(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = kWgk[7] * f(center);
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    sum += kWgk[j] * (f(center - dx) + f(center + dx));
  }
  return sum * half;
}

std::vector<double> panel_breakpoints(double a, double b, double inner, double panel_width) {
  std::vector<double> pts;
  if (!(b > a)) return {a, b};
  pts.push_back(a);
  if (a < -inner) {
    for (double x = -inner; x > a; x *= 2.0) {
      if (x < b) pts.push_back(x);
      if (!std::isfinite(x)) break;
    }
  }
  const double lo = std::max(a, -inner);
  const double hi = std::min(b, inner);
  if (hi > lo) {
    for (double k = std::floor(lo / panel_width) + 1.0; k * panel_width < hi; k += 1.0) {
      pts.push_back(k * panel_width);
    }
  }
  if (b > inner) {
    for (double x = inner; x < b; x *= 2.0) {
      if (x > a) pts.push_back(x);
    }
  }
  pts.push_back(b);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

}  // namespace nullrec::quad
