#pragma once

// Continuous Riemann-Liouville operators used as reference values.
//
// Sign convention: J^alpha with alpha > 0 is the fractional integral, and
// J^alpha with alpha < 0 is the Riemann-Liouville derivative of order -alpha.

#include <vector>

#include "fvi/cq.hpp"

namespace fvi::fracops {

/// Gamma function.
double gamma(double x);

/// 1/Gamma(x); exactly zero at the poles x = 0, -1, -2, ...
double reciprocal_gamma(double x);

/// Generalized binomial coefficient binom(a, n) for integer n >= 0.
double binomial(double a, int n);

enum class Convention { integral, derivative };

/// Fractional order together with its reading (integral or derivative).
struct FractionalOrder {
  double alpha = 0.0;
  Convention convention = Convention::integral;

  /// Order in the J^alpha convention (derivatives map to negative alpha).
  double operator_order() const;
};

/// Validates and builds a derivative order; requires 0 <= alpha <= 1.
FractionalOrder derivative_order(double alpha);
/// Validates and builds an integral order; requires alpha >= 0.
FractionalOrder integral_order(double alpha);

/// f(t) = scale * t^(beta - 1), beta not a non-positive integer.
struct PowerFunction {
  double beta = 1.0;
  double scale = 1.0;

  PowerFunction(double beta, double scale = 1.0);
  double operator()(double t) const;
};

/// J^alpha[t^(beta-1)](t) = Gamma(beta)/Gamma(beta+alpha) * t^(beta+alpha-1).
///
/// Returns 0 when 1/Gamma(beta+alpha) vanishes. At t = 0 the value is 0 for a
/// positive exponent, the Gamma ratio for a zero exponent and +inf otherwise.
double rl_integral_monomial(double alpha, double beta, double t);

/// J^alpha[t^(beta-1) sin t](t) summed from the Taylor series of sin.
double rl_integral_sin_power(double alpha, double beta, double t);

/// High-resolution D^alpha reference for tabulated data, 0 <= alpha <= 1.
///
/// Interpolates f linearly onto a grid `refinement` times finer, applies a
/// product-trapezoid J^(1-alpha) there, and differentiates by central
/// differences (one-sided at the ends). Returns values on the original grid.
cq::GridSeries rl_derivative_series(double alpha, const cq::GridSeries& f,
                                    int refinement);

}  // namespace fvi::fracops
