#include "nullrec/special_functions.hpp"

#include "nullrec/errors.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_expint.h>

#include <cmath>
#include <mutex>
#include <string>

namespace nullrec::special {
namespace {

void disable_gsl_abort() {
  static std::once_flag once;
  std::call_once(once, [] { gsl_set_error_handler_off(); });
}

double checked(int status, const gsl_sf_result& r, const char* what) {
  if (status != GSL_SUCCESS) {
    throw Error(std::string(what) + ": " + gsl_strerror(status));
  }
  return r.val;
}

}  // namespace

double sine_integral(double x) {
  disable_gsl_abort();
  gsl_sf_result r;
  return checked(gsl_sf_Si_e(x, &r), r, "sine integral");
}

double cosine_integral(double x) {
  disable_gsl_abort();
  gsl_sf_result r;
  return checked(gsl_sf_Ci_e(x, &r), r, "cosine integral");
}

double exponential_integral(double x) {
  disable_gsl_abort();
  gsl_sf_result r;
  return checked(gsl_sf_expint_Ei_e(x, &r), r, "exponential integral");
}

}  // namespace nullrec::special
