#pragma once

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <vector>

namespace nullrec::quad {

struct Options {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  int max_intervals = 200000;
};

struct Result {
  Eigen::VectorXd value;
  double error = 0.0;
  int evaluations = 0;
};

// Vector-valued integrand: writes f(x) into out (size fixed by the caller).
using VectorIntegrand = std::function<void(double, Eigen::Ref<Eigen::VectorXd>)>;

/// Globally adaptive 7/15-point Gauss-Kronrod quadrature of a vector-valued
/// integrand over [breakpoints.front(), breakpoints.back()]. The initial
/// partition is the breakpoint list; the interval with the largest error
/// estimate is bisected until the summed error meets the tolerance.
/// Throws QuadratureError when max_intervals is exhausted.
Result integrate(const VectorIntegrand& f, int dim, std::span<const double> breakpoints,
                 const Options& opts = {});

double integrate(const std::function<double(double)>& f, double a, double b,
                 const Options& opts = {});

double integrate(const std::function<double(double)>& f, std::span<const double> breakpoints,
                 const Options& opts = {});

// One non-adaptive 15-point Kronrod panel; used for short smooth pieces.
double kronrod15(const std::function<double(double)>& f, double a, double b);

/// Breakpoints covering [a, b] (finite): unit-width panels inside [-inner, inner],
/// geometrically growing panels outside it.
std::vector<double> panel_breakpoints(double a, double b, double inner = 1e4,
                                      double panel_width = 1.0);

}  // namespace nullrec::quad
