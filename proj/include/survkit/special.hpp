#pragma once

#include <cstddef>

namespace survkit {

// Regularized lower incomplete gamma P(a, x); series for x < a + 1,
// continued fraction (modified Lentz) otherwise.
double regularized_gamma_p(double a, double x);
double regularized_gamma_q(double a, double x);

// Survival function of the chi-squared distribution with df degrees of freedom.
double chi_squared_sf(double x, double df);

// Upper tail of the standard normal.
double normal_sf(double z);
double normal_cdf(double z);

// log(Gamma(x)) wrapper, kept here so callers avoid <cmath> name lookup traps.
double log_gamma(double x);

}  // namespace survkit
