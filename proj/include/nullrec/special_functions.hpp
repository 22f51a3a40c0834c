#pragma once

namespace nullrec::special {

/// Sine integral Si(x) = int_0^x sin(t)/t dt.
double sine_integral(double x);

/// Cosine integral Ci(x) = gamma + log x + int_0^x (cos t - 1)/t dt, x > 0.
double cosine_integral(double x);

/// Exponential integral Ei(x), x != 0.
double exponential_integral(double x);

}  // namespace nullrec::special
