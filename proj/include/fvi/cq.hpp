#pragma once

// Convolution quadrature (CQ) generated by backward differentiation formulas.
//
// The weights omega_n of J^alpha are the Maclaurin coefficients of
// (gamma_p(z)/h)^(-alpha), gamma_p(z) = sum_{k=1}^p (1-z)^k / k. The same
// weights serve the left (history) and the right (future) convolutions.

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace fvi::cq {

inline constexpr int kMaxBdfOrder = 6;

/// gamma_p(z) expanded in powers of z; coefficients[k] multiplies z^k.
struct BdfGeneratingPolynomial {
  int order = 1;
  std::vector<double> coefficients;

  double operator()(double z) const;
};

BdfGeneratingPolynomial bdf_generating_polynomial(int p);

/// omega_0..omega_N for J^alpha built on BDF-p with step h.
struct CqWeights {
  double alpha = 0.0;
  int bdf_order = 1;
  double step = 1.0;
  std::vector<double> omega;

  std::size_t length() const { return omega.empty() ? 0 : omega.size() - 1; }
  double operator[](std::size_t n) const { return omega[n]; }
};

/// First N+1 coefficients of (gamma_p(z)/h)^(-alpha) by the power-of-series
/// recurrence; O(p N).
CqWeights cq_weights(double alpha, int p, double h, std::size_t N);

/// Samples f_0..f_N on the uniform grid t_k = start_time + k * step.
struct GridSeries {
  std::vector<double> values;
  double step = 1.0;
  double start_time = 0.0;

  std::size_t size() const { return values.size(); }
  double time(std::size_t k) const { return start_time + static_cast<double>(k) * step; }
};

/// Samples `fn` at t_k = k h, k = 0..N.
template <class Fn>
GridSeries sample(Fn&& fn, double h, std::size_t N) {
  GridSeries g{std::vector<double>(N + 1), h, 0.0};
  for (std::size_t k = 0; k <= N; ++k) g.values[k] = fn(static_cast<double>(k) * h);
  return g;
}

/// g_k = sum_{n=0}^{k} omega_n f_{k-n}.
GridSeries conv_left(const CqWeights& w, const GridSeries& f);

/// g_k = sum_{n=0}^{N-k} omega_n f_{k+n}.
GridSeries conv_right(const CqWeights& w, const GridSeries& f);

/// Correction weights making the corrected left convolution exact on the
/// power basis t^q, q = 0..degree (offset 0), or t^(offset+q), q = 0..degree-1
/// (offset > 0, node 0 unused).
struct StartingQuadrature {
  double alpha = 0.0;
  int bdf_order = 1;
  int degree = 0;
  double offset = 0.0;
  double step = 1.0;
  /// Row k holds varpi_{k,0..degree}; rows 0..N.
  Eigen::MatrixXd weights;
  /// 1-norm condition number of the node Vandermonde matrix.
  double condition = 1.0;
  /// Rows whose exact target is singular (t_k = 0 with a negative exponent);
  /// those rows are left at zero.
  std::vector<std::size_t> singular_rows;

  std::size_t rows() const { return static_cast<std::size_t>(weights.rows()); }
};

/// Solves the exactness system for every k = 0..N on the nodes t_0..t_s
/// (t_1..t_s with a positive offset).
StartingQuadrature starting_quadrature(double alpha, int p, double h, std::size_t N, int s,
                                       double offset = 0.0);

/// conv_left plus h^alpha sum_{n=0}^{s} varpi_{k,n} f_n.
GridSeries corrected_conv_left(const CqWeights& w, const StartingQuadrature& sq,
                               const GridSeries& f);

/// Maximum-norm distance between two series of equal length.
double max_abs_difference(const GridSeries& a, const GridSeries& b);

}  // namespace fvi::cq
