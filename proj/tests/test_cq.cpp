#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "doctest.h"
#include "fvi/cq.hpp"
#include "fvi/errors.hpp"
#include "fvi/fracops.hpp"

using namespace fvi;
using namespace fvi::cq;

namespace {

using Poly = std::vector<double>;

Poly multiply(const Poly& a, const Poly& b, std::size_t n) {
  Poly c(n + 1, 0.0);
  for (std::size_t i = 0; i < a.size() && i <= n; ++i)
    for (std::size_t j = 0; j < b.size() && i + j <= n; ++j) c[i + j] += a[i] * b[j];
  return c;
}

// (1 - z)^k expanded with integer binomials.
Poly one_minus_z_power(int k) {
  Poly c(static_cast<std::size_t>(k) + 1);
  double b = 1.0;
  for (int j = 0; j <= k; ++j) {
    c[static_cast<std::size_t>(j)] = (j % 2 == 0 ? 1.0 : -1.0) * b;
    b = b * (k - j) / (j + 1);
  }
  return c;
}

Poly bdf_oracle(int p) {
  Poly g(static_cast<std::size_t>(p) + 1, 0.0);
  for (int k = 1; k <= p; ++k) {
    const auto t = one_minus_z_power(k);
    for (std::size_t j = 0; j < t.size(); ++j) g[j] += t[j] / k;
  }
  return g;
}

// Maclaurin coefficients of (gamma_p(z)/h)^(-alpha) by the Cauchy integral on
// |z| = rho, evaluated with the trapezoid rule (spectrally accurate).
Poly weights_oracle(double alpha, int p, double h, std::size_t n) {
  const Poly g = bdf_oracle(p);
  const double rho = 0.95;
  const int m = 4096;
  const double two_pi = 2.0 * std::acos(-1.0);
  Poly out(n + 1, 0.0);
  for (int j = 0; j < m; ++j) {
    const std::complex<double> w = std::polar(1.0, two_pi * j / m);
    const std::complex<double> z = rho * w;
    std::complex<double> gz = 0.0, zk = 1.0;
    for (double c : g) {
      gz += c * zk;
      zk *= z;
    }
    const std::complex<double> f = std::pow(gz / h, -alpha);
    std::complex<double> wn = 1.0;
    for (std::size_t k = 0; k <= n; ++k) {
      out[k] += (f * std::conj(wn)).real();
      wn *= w;
    }
  }
  for (std::size_t k = 0; k <= n; ++k) out[k] *= std::pow(rho, -static_cast<double>(k)) / m;
  return out;
}

GridSeries random_series(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  GridSeries g{std::vector<double>(n + 1), 0.1, 0.0};
  for (double& v : g.values) v = dist(rng);
  return g;
}

double dot(const GridSeries& a, const GridSeries& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a.values[k] * b.values[k];
  return s;
}

}  // namespace

TEST_CASE("BDF generating polynomial") {
  const auto p1 = bdf_generating_polynomial(1).coefficients;
  CHECK(p1 == Poly{1.0, -1.0});
  const auto p2 = bdf_generating_polynomial(2).coefficients;
  REQUIRE(p2.size() == 3);
  CHECK(p2[0] == doctest::Approx(1.5));
  CHECK(p2[1] == doctest::Approx(-2.0));
  CHECK(p2[2] == doctest::Approx(0.5));
  const auto p3 = bdf_generating_polynomial(3).coefficients;
  CHECK(p3[0] == doctest::Approx(11.0 / 6.0));
  CHECK(p3[3] == doctest::Approx(-1.0 / 3.0));
  for (int p = 1; p <= 6; ++p) {
    const auto g = bdf_generating_polynomial(p);
    const auto o = bdf_oracle(p);
    for (std::size_t j = 0; j < o.size(); ++j)
      CHECK(g.coefficients[j] == doctest::Approx(o[j]).epsilon(1e-14));
    CHECK(std::abs(g(1.0)) < 1e-14);
  }
  CHECK_THROWS_AS(bdf_generating_polynomial(0), InvalidOrderError);
  CHECK_THROWS_AS(bdf_generating_polynomial(7), InvalidOrderError);
}

TEST_CASE("CQ weights: closed forms") {
  const auto w0 = cq_weights(0.0, 3, 0.1, 5);
  CHECK(w0.omega == std::vector<double>{1, 0, 0, 0, 0, 0});

  const auto w = cq_weights(-0.5, 1, 1.0, 4);
  const std::vector<double> expected{1.0, -0.5, -0.125, -0.0625, -5.0 / 128.0};
  for (std::size_t n = 0; n < expected.size(); ++n)
    CHECK(w[n] == doctest::Approx(expected[n]).epsilon(1e-15));

  const auto ones = cq_weights(1.0, 1, 1.0, 50);
  for (std::size_t n = 0; n <= 50; ++n) CHECK(ones[n] == doctest::Approx(1.0).epsilon(1e-14));

  const auto diff = cq_weights(-1.0, 1, 0.1, 6);
  CHECK(diff[0] == doctest::Approx(10.0));
  CHECK(diff[1] == doctest::Approx(-10.0));
  for (std::size_t n = 2; n <= 6; ++n) CHECK(std::abs(diff[n]) < 1e-13);

  CHECK_THROWS_AS(cq_weights(0.5, 7, 1.0, 4), InvalidOrderError);
  CHECK_THROWS_AS(cq_weights(0.5, 1, 0.0, 4), InvalidConfigurationError);
  CHECK_THROWS_AS(cq_weights(NAN, 1, 1.0, 4), InvalidConfigurationError);
}

TEST_CASE("CQ weights match the Cauchy-integral oracle for every BDF order") {
  for (int p = 1; p <= 6; ++p)
    for (double alpha : {-1.5, -0.5, 0.25, 0.75})
      for (double h : {1.0, 0.125}) {
        const std::size_t n = 40;
        const auto w = cq_weights(alpha, p, h, n);
        const auto o = weights_oracle(alpha, p, h, n);
        const double scale = std::max(1.0, std::abs(o[0]));
        for (std::size_t k = 0; k <= n; ++k)
          CHECK(std::abs(w[k] - o[k]) <= 1e-10 * scale);
      }
}

TEST_CASE("CQ weights scale as h^alpha") {
  const auto a = cq_weights(0.3, 4, 1.0, 30);
  const auto b = cq_weights(0.3, 4, 0.01, 30);
  for (std::size_t n = 0; n <= 30; ++n)
    CHECK(b[n] == doctest::Approx(std::pow(0.01, 0.3) * a[n]).epsilon(1e-13));
}

TEST_CASE("conv_left and conv_right examples") {
  const auto w = cq_weights(-0.5, 1, 1.0, 10);
  GridSeries ones{std::vector<double>(11, 1.0), 1.0, 0.0};
  const auto g = conv_left(w, ones);
  CHECK(g.values[0] == doctest::Approx(1.0));
  CHECK(g.values[1] == doctest::Approx(0.5));
  CHECK(g.values[2] == doctest::Approx(0.375));

  const auto id = cq_weights(0.0, 2, 1.0, 10);
  GridSeries f{{3, 1, 4, 1, 5, 9, 2, 6, 5, 3, 5}, 1.0, 0.0};
  CHECK(conv_left(id, f).values == f.values);
  CHECK(conv_right(id, f).values == f.values);

  GridSeries last{std::vector<double>(11, 0.0), 1.0, 0.0};
  last.values[10] = 1.0;
  const auto r = conv_right(w, last);
  for (std::size_t k = 0; k <= 10; ++k) CHECK(r.values[k] == w[10 - k]);

  const auto short_w = cq_weights(0.5, 1, 1.0, 3);
  CHECK_THROWS_AS(conv_left(short_w, f), DimensionError);
  CHECK_THROWS_AS(conv_right(short_w, f), DimensionError);
  CHECK_THROWS_AS(conv_left(w, GridSeries{}), DimensionError);
}

TEST_CASE("conv_left on f = t with BDF2") {
  // second order away from the origin; the first grid points carry an
  // O(h^{3/2}) layer, which is what the max norm over the whole grid sees
  auto error = [](std::size_t n, double from) {
    const double h = 1.0 / static_cast<double>(n);
    const auto f = sample([](double t) { return t; }, h, n);
    const auto g = conv_left(cq_weights(0.5, 2, h, n), f);
    double worst = 0.0;
    for (std::size_t k = 0; k <= n; ++k)
      if (g.time(k) >= from)
        worst = std::max(worst, std::abs(g.values[k] - fracops::rl_integral_monomial(0.5, 2.0, g.time(k))));
    return worst;
  };
  CHECK(std::log2(error(256, 0.5) / error(1024, 0.5)) / 2.0 == doctest::Approx(2.0).epsilon(0.05));
  CHECK(std::log2(error(256, 0.0) / error(1024, 0.0)) / 2.0 == doctest::Approx(1.5).epsilon(0.05));
  CHECK(error(1024, 0.0) < 1e-4);
}

TEST_CASE("summation by parts and semigroup on random data") {
  std::mt19937_64 rng(20240611);
  for (std::size_t n : {16u, 64u, 256u})
    for (int p = 1; p <= 3; ++p)
      for (double a : {0.1, 0.5}) {
        const auto w = cq_weights(a, p, 0.1, n);
        const auto f = random_series(rng, n), g = random_series(rng, n);
        const double lhs = dot(g, conv_left(w, f)), rhs = dot(conv_right(w, g), f);
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));

        const auto wb = cq_weights(0.25, p, 0.1, n);
        const auto wab = cq_weights(a + 0.25, p, 0.1, n);
        const auto two = conv_left(w, conv_left(wb, f));
        const auto one = conv_left(wab, f);
        const auto two_r = conv_right(w, conv_right(wb, f));
        const auto one_r = conv_right(wab, f);
        double scale = 0.0;
        for (double v : one.values) scale = std::max(scale, std::abs(v));
        CHECK(max_abs_difference(two, one) <= 1e-10 * scale);
        CHECK(max_abs_difference(two_r, one_r) <= 1e-10 * scale);

        // alpha followed by -alpha is the identity
        const auto back = conv_left(cq_weights(-a, p, 0.1, n), conv_left(w, f));
        CHECK(max_abs_difference(back, f) <= 1e-10);
      }
}

TEST_CASE("starting quadrature rows") {
  const auto sq = starting_quadrature(0.5, 3, 0.1, 20, 2);
  CHECK(sq.rows() == 21);
  CHECK(sq.condition >= 1.0);
  CHECK(sq.singular_rows.empty());
  // k = 0: targets vanish for q >= 1 and the weights reproduce J[1](0) = 0
  CHECK(sq.weights.row(0).sum() == doctest::Approx(-1.0 * cq_weights(0.5, 3, 1.0, 0)[0]));

  // BDF1 for J^1 sums f_0..f_k, one rectangle too many on constants, so the
  // correction is -1 on f_0 in every row
  const auto rect = starting_quadrature(1.0, 1, 0.5, 10, 0);
  for (Eigen::Index k = 0; k <= 10; ++k) CHECK(rect.weights(k, 0) == doctest::Approx(-1.0));

  const auto deriv = starting_quadrature(-0.5, 2, 0.1, 10, 1);
  REQUIRE(deriv.singular_rows.size() == 1);
  CHECK(deriv.singular_rows[0] == 0);
  CHECK(deriv.weights.row(0).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(starting_quadrature(0.5, 2, 0.1, 10, 7), InvalidConfigurationError);
  CHECK_THROWS_AS(starting_quadrature(0.5, 2, 0.1, 2, 3), DimensionError);
  CHECK_THROWS_AS(starting_quadrature(0.5, 2, 0.1, 10, 0, 1.5), InvalidConfigurationError);
}

TEST_CASE("corrected convolution is exact on its basis") {
  const double h = 0.05;
  const std::size_t n = 20;
  for (double alpha : {0.5, -0.5, 0.75}) {
    const auto w = cq_weights(alpha, 3, h, n);
    const auto sq = starting_quadrature(alpha, 3, h, n, 3);
    for (int q = 0; q <= 3; ++q) {
      const auto f = sample([q](double t) { return std::pow(t, q); }, h, n);
      const auto g = corrected_conv_left(w, sq, f);
      for (std::size_t k = 1; k <= n; ++k) {
        const double exact = fracops::rl_integral_monomial(alpha, q + 1.0, g.time(k));
        CHECK(g.values[k] == doctest::Approx(exact).epsilon(1e-9).scale(1.0));
      }
    }
    const auto sq_off = starting_quadrature(alpha, 3, h, n, 2, 1.5);
    CHECK(sq_off.weights.col(0).cwiseAbs().maxCoeff() == 0.0);
    for (double e : {1.5, 2.5}) {
      const auto f = sample([e](double t) { return std::pow(t, e); }, h, n);
      const auto g = corrected_conv_left(w, sq_off, f);
      for (std::size_t k = 1; k <= n; ++k)
        CHECK(g.values[k] == doctest::Approx(fracops::rl_integral_monomial(alpha, e + 1.0, g.time(k)))
                                 .epsilon(1e-9)
                                 .scale(1.0));
    }
  }
  // an all-zero correction leaves the convolution unchanged
  auto sq = starting_quadrature(0.5, 2, h, n, 1);
  sq.weights.setZero();
  const auto f = sample([](double t) { return std::exp(t); }, h, n);
  const auto w = cq_weights(0.5, 2, h, n);
  CHECK(corrected_conv_left(w, sq, f).values == conv_left(w, f).values);
}

TEST_CASE("correction on the t^(3/2) family restores the BDF3 order") {
  // f = t^{3/2} e^t; J^{1/2} f = sum_m Gamma(m+5/2)/Gamma(m+3)/m! t^{m+2}
  auto exact = [](double t) {
    double s = 0.0, fact = 1.0;
    for (int m = 0; m < 60; ++m) {
      if (m > 0) fact *= m;
      s += std::exp(std::lgamma(m + 2.5) - std::lgamma(m + 3.0)) / fact * std::pow(t, m + 2.0);
    }
    return s;
  };
  auto error = [&](std::size_t n, bool corrected) {
    const double h = 1.0 / static_cast<double>(n);
    const auto f = sample([](double t) { return std::pow(t, 1.5) * std::exp(t); }, h, n);
    const auto w = cq_weights(0.5, 3, h, n);
    const auto g = corrected ? corrected_conv_left(w, starting_quadrature(0.5, 3, h, n, 3, 1.5), f)
                             : conv_left(w, f);
    double worst = 0.0;
    for (std::size_t k = 0; k <= n; ++k) worst = std::max(worst, std::abs(g.values[k] - exact(g.time(k))));
    return worst;
  };
  const double plain = std::log2(error(64, false) / error(256, false)) / 2.0;
  const double fixed = std::log2(error(64, true) / error(256, true)) / 2.0;
  CHECK(plain < 2.6);
  CHECK(fixed >= 2.5);
}
