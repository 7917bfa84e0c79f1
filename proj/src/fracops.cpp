#include "fvi/fracops.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "fvi/errors.hpp"

namespace fvi::fracops {

namespace {

bool is_nonpositive_integer(double x) { return x <= 0.0 && std::floor(x) == x; }

// Gamma(a)/Gamma(b) for a > 0, falling back to log-gamma for large arguments.
double gamma_ratio(double a, double b) {
  if (a < 150.0 && std::abs(b) < 150.0) return gamma(a) * reciprocal_gamma(b);
  if (is_nonpositive_integer(b)) return 0.0;
  return std::exp(std::lgamma(a) - std::lgamma(b));
}

}  // namespace

double gamma(double x) { return std::tgamma(x); }

double reciprocal_gamma(double x) {
  if (is_nonpositive_integer(x)) return 0.0;
  return 1.0 / std::tgamma(x);
}

double binomial(double a, int n) {
  double c = 1.0;
  for (int j = 0; j < n; ++j) c *= (a - j) / (j + 1);
  return c;
}

double FractionalOrder::operator_order() const {
  return convention == Convention::integral ? alpha : -alpha;
}

FractionalOrder derivative_order(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw InvalidConfigurationError("derivative order must lie in [0, 1], got " +
                                    std::to_string(alpha));
  return {alpha, Convention::derivative};
}

FractionalOrder integral_order(double alpha) {
  if (!(alpha >= 0.0))
    throw InvalidConfigurationError("integral order must be >= 0, got " +
                                    std::to_string(alpha));
  return {alpha, Convention::integral};
}

PowerFunction::PowerFunction(double beta_, double scale_) : beta(beta_), scale(scale_) {
  if (is_nonpositive_integer(beta))
    throw InvalidConfigurationError("power exponent beta must not be 0, -1, -2, ...");
}

double PowerFunction::operator()(double t) const { return scale * std::pow(t, beta - 1.0); }

double rl_integral_monomial(double alpha, double beta, double t) {
  if (t < 0.0) throw InvalidConfigurationError("rl_integral_monomial needs t >= 0");
  if (is_nonpositive_integer(beta))
    throw InvalidConfigurationError("beta must not be a non-positive integer");
  const double coeff = gamma(beta) * reciprocal_gamma(beta + alpha);
  if (coeff == 0.0) return 0.0;
  const double exponent = beta + alpha - 1.0;
  if (t == 0.0) {
    if (exponent > 0.0) return 0.0;
    if (exponent == 0.0) return coeff;
    return std::numeric_limits<double>::infinity();
  }
  return coeff * std::pow(t, exponent);
}

double rl_integral_sin_power(double alpha, double beta, double t) {
  if (t < 0.0) throw InvalidConfigurationError("rl_integral_sin_power needs t >= 0");
  if (t == 0.0) return rl_integral_monomial(alpha, beta + 1.0, 0.0);
  // t^(beta-1) sin t = sum_m (-1)^m t^(beta+2m) / (2m+1)!
  double sum = 0.0;
  for (int m = 0; m < 200; ++m) {
    const double a = beta + 2.0 * m + 1.0;
    const double log_fact = std::lgamma(2.0 * m + 2.0);
    const double ratio = gamma_ratio(a, a + alpha);
    const double term = ratio * std::exp(-log_fact + (a + alpha - 1.0) * std::log(t));
    sum += (m % 2 == 0) ? term : -term;
    if (m > 2 && std::abs(term) <= 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

cq::GridSeries rl_derivative_series(double alpha, const cq::GridSeries& f, int refinement) {
  if (refinement < 4)
    throw InvalidConfigurationError("refinement must be >= 4, got " +
                                    std::to_string(refinement));
  derivative_order(alpha);
  const std::size_t n = f.values.size();
  if (n < 2) throw DimensionError("rl_derivative_series needs at least two samples");
  if (alpha == 0.0) return f;

  const std::size_t m = (n - 1) * static_cast<std::size_t>(refinement);
  const double delta = f.step / refinement;
  std::vector<double> fine(m + 1);
  for (std::size_t j = 0; j <= m; ++j) {
    const std::size_t k = j / refinement;
    const std::size_t r = j % refinement;
    if (r == 0) {
      fine[j] = f.values[k];
    } else {
      const double w = static_cast<double>(r) / refinement;
      fine[j] = (1.0 - w) * f.values[k] + w * f.values[k + 1];
    }
  }

  // Product-trapezoid rule for J^g, exact for piecewise linear data.
  const double g = 1.0 - alpha;
  std::vector<double> integral(m + 1, 0.0);
  if (g == 0.0) {
    integral = fine;
  } else {
    const double scale = std::pow(delta, g) * reciprocal_gamma(g + 2.0);
    auto p = [g](double x) { return std::pow(x, g + 1.0); };
    for (std::size_t i = 1; i <= m; ++i) {
      const double di = static_cast<double>(i);
      double acc = (p(di - 1.0) - (di - g - 1.0) * std::pow(di, g)) * fine[0];
      for (std::size_t j = 1; j < i; ++j) {
        const double q = static_cast<double>(i - j);
        acc += (p(q + 1.0) + p(q - 1.0) - 2.0 * p(q)) * fine[j];
      }
      acc += fine[i];
      integral[i] = scale * acc;
    }
  }

  cq::GridSeries out{std::vector<double>(n), f.step, f.start_time};
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = k * static_cast<std::size_t>(refinement);
    double d;
    if (j == 0) {
      d = (-3.0 * integral[0] + 4.0 * integral[1] - integral[2]) / (2.0 * delta);
    } else if (j == m) {
      d = (3.0 * integral[m] - 4.0 * integral[m - 1] + integral[m - 2]) / (2.0 * delta);
    } else {
      d = (integral[j + 1] - integral[j - 1]) / (2.0 * delta);
    }
    out.values[k] = d;
  }
  return out;
}

}  // namespace fvi::fracops
