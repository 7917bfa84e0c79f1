#include "fvi/cq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fvi/errors.hpp"
#include "fvi/fracops.hpp"

namespace fvi::cq {

namespace {

void check_order(int p) {
  if (p < 1 || p > kMaxBdfOrder)
    throw InvalidOrderError("BDF order must lie in 1.." + std::to_string(kMaxBdfOrder) +
                            ", got " + std::to_string(p));
}

void check_lengths(const CqWeights& w, const GridSeries& f) {
  if (f.values.empty()) throw DimensionError("empty grid series");
  if (w.omega.size() < f.values.size())
    throw DimensionError("CQ weights hold " + std::to_string(w.omega.size()) +
                         " entries but the series has " + std::to_string(f.values.size()));
}

}  // namespace

double BdfGeneratingPolynomial::operator()(double z) const {
  double acc = 0.0;
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * z + *it;
  return acc;
}

BdfGeneratingPolynomial bdf_generating_polynomial(int p) {
  check_order(p);
  BdfGeneratingPolynomial poly{p, std::vector<double>(static_cast<std::size_t>(p) + 1, 0.0)};
  // (1-z)^k / k = sum_j binom(k, j) (-1)^j z^j / k
  for (int k = 1; k <= p; ++k) {
    double binom = 1.0;
    for (int j = 0; j <= k; ++j) {
      poly.coefficients[j] += ((j % 2 == 0) ? binom : -binom) / k;
      binom = binom * (k - j) / (j + 1);
    }
  }
  return poly;
}

CqWeights cq_weights(double alpha, int p, double h, std::size_t N) {
  check_order(p);
  if (!(h > 0.0) || !std::isfinite(h))
    throw InvalidConfigurationError("step h must be positive, got " + std::to_string(h));
  if (!std::isfinite(alpha)) throw InvalidConfigurationError("alpha must be finite");
  const auto poly = bdf_generating_polynomial(p);
  if (!(poly.coefficients[0] > 0.0))
    throw InvalidConfigurationError("generating polynomial must satisfy gamma(0) > 0");

  std::vector<double> a(poly.coefficients.size());
  std::transform(poly.coefficients.begin(), poly.coefficients.end(), a.begin(),
                 [h](double c) { return c / h; });

  // c = a^e with a(z) c'(z) = e a'(z) c(z):
  //   c_n = 1/(n a_0) sum_{k=1}^{min(n,p)} ((e+1) k - n) a_k c_{n-k}
  const double e = -alpha;
  CqWeights w{alpha, p, h, std::vector<double>(N + 1, 0.0)};
  w.omega[0] = std::pow(a[0], e);
  for (std::size_t n = 1; n <= N; ++n) {
    const std::size_t kmax = std::min<std::size_t>(n, static_cast<std::size_t>(p));
    double acc = 0.0;
    for (std::size_t k = 1; k <= kmax; ++k)
      acc += ((e + 1.0) * static_cast<double>(k) - static_cast<double>(n)) * a[k] *
             w.omega[n - k];
    w.omega[n] = acc / (static_cast<double>(n) * a[0]);
  }
  return w;
}

GridSeries conv_left(const CqWeights& w, const GridSeries& f) {
  check_lengths(w, f);
  const std::size_t n = f.values.size();
  GridSeries g{std::vector<double>(n, 0.0), f.step, f.start_time};
  for (std::size_t k = 0; k < n; ++k) {
    double acc = 0.0;
    for (std::size_t j = 0; j <= k; ++j) acc += w.omega[j] * f.values[k - j];
    g.values[k] = acc;
  }
  return g;
}

GridSeries conv_right(const CqWeights& w, const GridSeries& f) {
  check_lengths(w, f);
  const std::size_t n = f.values.size();
  GridSeries g{std::vector<double>(n, 0.0), f.step, f.start_time};
  for (std::size_t k = 0; k < n; ++k) {
    double acc = 0.0;
    for (std::size_t j = 0; k + j < n; ++j) acc += w.omega[j] * f.values[k + j];
    g.values[k] = acc;
  }
  return g;
}

StartingQuadrature starting_quadrature(double alpha, int p, double h, std::size_t N, int s,
                                       double offset) {
  if (!(offset >= 0.0) || !std::isfinite(offset))
    throw InvalidConfigurationError("exponent offset must be a finite real >= 0");
  if (offset > 0.0 && s < 1)
    throw InvalidConfigurationError("a positive exponent offset needs degree >= 1");
  if (s < 0 || s > kMaxBdfOrder)
    throw InvalidConfigurationError("correction degree must lie in 0.." +
                                    std::to_string(kMaxBdfOrder) + ", got " +
                                    std::to_string(s));
  if (N < static_cast<std::size_t>(s))
    throw DimensionError("starting quadrature of degree " + std::to_string(s) +
                         " needs at least " + std::to_string(s + 1) + " grid points");
  // Row k scaled by h^-(e+alpha) is independent of h, so the system is solved
  // with unit step:
  //   sum_n varpi_{k,n} n^e = G_e k^(e+alpha) - sum_j w_j (k-j)^e,
  // where w are the unit-step weights and e runs over the basis exponents.
  // With a positive offset every basis function vanishes at t = 0, so node 0
  // is dropped and its weight stays zero.
  const auto unit = cq_weights(alpha, p, 1.0, N);
  const int first = offset > 0.0 ? 1 : 0;
  const int m = s + 1 - first;
  auto exponent = [&](int q) { return offset + q; };

  Eigen::MatrixXd vandermonde(m, m);
  for (int q = 0; q < m; ++q)
    for (int n = 0; n < m; ++n)
      vandermonde(q, n) = std::pow(static_cast<double>(n + first), exponent(q));
  Eigen::FullPivLU<Eigen::MatrixXd> lu(vandermonde);
  double condition = std::numeric_limits<double>::infinity();
  if (lu.isInvertible()) {
    const Eigen::MatrixXd inv = lu.inverse();
    condition = vandermonde.cwiseAbs().colwise().sum().maxCoeff() *
                inv.cwiseAbs().colwise().sum().maxCoeff();
  }
  if (!lu.isInvertible() || !std::isfinite(condition))
    throw NumericalDegeneracyError("starting-quadrature Vandermonde matrix is singular",
                                   condition);

  StartingQuadrature sq;
  sq.alpha = alpha;
  sq.bdf_order = p;
  sq.degree = s;
  sq.offset = offset;
  sq.step = h;
  sq.condition = condition;
  sq.weights = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(N + 1), s + 1);

  Eigen::VectorXd rhs(m);
  for (std::size_t k = 0; k <= N; ++k) {
    bool singular = false;
    for (int q = 0; q < m; ++q) {
      const double exact =
          fracops::rl_integral_monomial(alpha, exponent(q) + 1.0, static_cast<double>(k));
      if (!std::isfinite(exact)) {
        singular = true;
        break;
      }
      double cq_value = 0.0;
      for (std::size_t j = 0; j <= k; ++j)
        cq_value += unit.omega[j] * std::pow(static_cast<double>(k - j), exponent(q));
      rhs(q) = exact - cq_value;
    }
    if (singular) {
      sq.singular_rows.push_back(k);
      continue;
    }
    sq.weights.block(static_cast<Eigen::Index>(k), first, 1, m) = lu.solve(rhs).transpose();
  }
  return sq;
}

GridSeries corrected_conv_left(const CqWeights& w, const StartingQuadrature& sq,
                               const GridSeries& f) {
  GridSeries g = conv_left(w, f);
  if (sq.rows() < f.values.size())
    throw DimensionError("starting quadrature has fewer rows than the series");
  if (f.values.size() < static_cast<std::size_t>(sq.degree) + 1)
    throw DimensionError("series shorter than the starting-quadrature nodes");
  const double scale = std::pow(f.step, sq.alpha);
  for (std::size_t k = 0; k < g.values.size(); ++k) {
    double acc = 0.0;
    for (int n = 0; n <= sq.degree; ++n)
      acc += sq.weights(static_cast<Eigen::Index>(k), n) * f.values[static_cast<std::size_t>(n)];
    g.values[k] += scale * acc;
  }
  return g;
}

double max_abs_difference(const GridSeries& a, const GridSeries& b) {
  if (a.values.size() != b.values.size()) throw DimensionError("series lengths differ");
  double m = 0.0;
  for (std::size_t k = 0; k < a.values.size(); ++k)
    m = std::max(m, std::abs(a.values[k] - b.values[k]));
  return m;
}

}  // namespace fvi::cq
