#pragma once

// Central-difference checks of analytic partial derivatives, shared by the
// unit tests and the acceptance binary.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "fvi/models.hpp"

namespace fvi::testing {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// L = (1 + q1^2/10) |v|^2 / 2 + 3/10 sin(q0) v1 - cos(q0 q1) + t q0
inline models::LagrangianModel nonlinear_model() {
  models::LagrangianModel m;
  m.id = "nonlinear-2d";
  m.dim = 2;
  m.lagrangian = [](double t, const Vec& q, const Vec& v) {
    return 0.5 * (1.0 + 0.1 * q(1) * q(1)) * v.squaredNorm() + 0.3 * std::sin(q(0)) * v(1) -
           std::cos(q(0) * q(1)) + t * q(0);
  };
  m.dl_dq = [](double t, const Vec& q, const Vec& v) {
    const double s = std::sin(q(0) * q(1));
    Vec g(2);
    g << 0.3 * std::cos(q(0)) * v(1) + s * q(1) + t, 0.1 * q(1) * v.squaredNorm() + s * q(0);
    return g;
  };
  m.dl_dqdot = [](double, const Vec& q, const Vec& v) {
    Vec g = (1.0 + 0.1 * q(1) * q(1)) * v;
    g(1) += 0.3 * std::sin(q(0));
    return g;
  };
  m.d2l_dqdq = [](double, const Vec& q, const Vec& v) {
    const double c = std::cos(q(0) * q(1)), s = std::sin(q(0) * q(1));
    Mat H(2, 2);
    H(0, 0) = -0.3 * std::sin(q(0)) * v(1) + c * q(1) * q(1);
    H(0, 1) = H(1, 0) = c * q(0) * q(1) + s;
    H(1, 1) = 0.1 * v.squaredNorm() + c * q(0) * q(0);
    return H;
  };
  m.d2l_dqdqdot = [](double, const Vec& q, const Vec& v) {
    Mat H = Mat::Zero(2, 2);
    H(0, 1) = 0.3 * std::cos(q(0));
    H(1, 0) = 0.2 * q(1) * v(0);
    H(1, 1) = 0.2 * q(1) * v(1);
    return H;
  };
  m.d2l_dqdotdqdot = [](double, const Vec& q, const Vec&) {
    return Mat(Mat::Identity(2, 2) * (1.0 + 0.1 * q(1) * q(1)));
  };
  return m;
}

inline double relative_gap(double analytic, double fd) {
  return std::abs(analytic - fd) / std::max(1.0, std::abs(analytic));
}

// Gradient of f at x by central differences.
inline Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& x,
                       double step = 1e-5) {
  Vec g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vec a = x, b = x;
    a(i) += step;
    b(i) -= step;
    g(i) = (f(a) - f(b)) / (2.0 * step);
  }
  return g;
}

inline Mat fd_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& x,
                       double step = 1e-5) {
  const Vec f0 = f(x);
  Mat J(f0.size(), x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vec a = x, b = x;
    a(i) += step;
    b(i) -= step;
    J.col(i) = (f(a) - f(b)) / (2.0 * step);
  }
  return J;
}

inline double worst_gap(const Mat& analytic, const Mat& fd) {
  double w = 0.0;
  for (Eigen::Index i = 0; i < analytic.rows(); ++i)
    for (Eigen::Index j = 0; j < analytic.cols(); ++j)
      w = std::max(w, relative_gap(analytic(i, j), fd(i, j)));
  return w;
}

inline Vec stack(const std::vector<Vec>& parts) {
  Eigen::Index n = 0;
  for (const auto& p : parts) n += p.size();
  Vec out(n);
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    out.segment(at, p.size()) = p;
    at += p.size();
  }
  return out;
}

inline std::vector<Vec> unstack(const Vec& x, int dim) {
  std::vector<Vec> parts;
  for (Eigen::Index at = 0; at < x.size(); at += dim) parts.push_back(x.segment(at, dim));
  return parts;
}

// Largest relative gap of the model partials (first and second) at one point.
inline double model_partials_gap(const models::LagrangianModel& m, double t, const Vec& q,
                                 const Vec& v) {
  double w = 0.0;
  w = std::max(w, worst_gap(m.dl_dq(t, q, v),
                            fd_gradient([&](const Vec& y) { return m.lagrangian(t, y, v); }, q)));
  w = std::max(w, worst_gap(m.dl_dqdot(t, q, v),
                            fd_gradient([&](const Vec& y) { return m.lagrangian(t, q, y); }, v)));
  if (m.has_hessian()) {
    w = std::max(w, worst_gap(m.d2l_dqdq(t, q, v),
                              fd_jacobian([&](const Vec& y) { return m.dl_dq(t, y, v); }, q)));
    // (i, j) = d/dqdot_j of dL/dq_i
    w = std::max(w, worst_gap(m.d2l_dqdqdot(t, q, v),
                              fd_jacobian([&](const Vec& y) { return m.dl_dq(t, q, y); }, v)));
    w = std::max(w, worst_gap(m.d2l_dqdotdqdot(t, q, v),
                              fd_jacobian([&](const Vec& y) { return m.dl_dqdot(t, q, y); }, v)));
  }
  return w;
}

inline double midpoint_ld_gap(const models::LagrangianModel& m, const Vec& a, const Vec& b,
                              double t, double h) {
  const int d = m.dim;
  const Vec x = stack({a, b});
  auto value = [&](const Vec& y) {
    return models::midpoint_ld(m, y.head(d), y.tail(d), t, h).value;
  };
  auto grad = [&](const Vec& y) {
    const auto p = models::midpoint_ld(m, y.head(d), y.tail(d), t, h);
    return stack({p.d1, p.d2});
  };
  double w = worst_gap(grad(x), fd_gradient(value, x));
  if (m.has_hessian()) {
    const auto H = models::midpoint_ld_hessian(m, a, b, t, h);
    Mat full(2 * d, 2 * d);
    full << H.d11, H.d12, H.d21, H.d22;
    w = std::max(w, worst_gap(full, fd_jacobian(grad, x)));
  }
  return w;
}

inline double galerkin_ld_gap(const models::LagrangianModel& m,
                              const models::GalerkinScheme& scheme, const std::vector<Vec>& nodes,
                              double t, double h) {
  const int d = m.dim;
  const Vec x = stack(nodes);
  auto value = [&](const Vec& y) {
    const auto n = unstack(y, d);
    return models::galerkin_ld(m, scheme, n, t, h).value;
  };
  auto grad = [&](const Vec& y) {
    const auto n = unstack(y, d);
    return stack(models::galerkin_ld(m, scheme, n, t, h).partials);
  };
  double w = worst_gap(grad(x), fd_gradient(value, x));
  if (m.has_hessian())
    w = std::max(w, worst_gap(models::galerkin_ld_hessian(m, scheme, nodes, t, h),
                              fd_jacobian(grad, x)));
  return w;
}

// Worst relative gap over `samples` random evaluations of every analytic
// partial: the catalog models, the nonlinear test model, the midpoint L_d and
// the Galerkin L_d (s = 1, 2, 3).
inline double random_partials_gap(int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  std::uniform_real_distribution<double> step(0.05, 0.5);
  std::vector<models::LagrangianModel> catalog;
  for (const auto& c : models::builtin_models()) catalog.push_back(c.model);
  catalog.push_back(models::free_particle(3));
  catalog.push_back(nonlinear_model());
  const std::vector<models::GalerkinScheme> schemes{
      models::GalerkinScheme::midpoint(), models::GalerkinScheme::gauss(2, 2),
      models::GalerkinScheme::gauss(3, 3)};

  auto random_vec = [&](int d) {
    Vec v(d);
    for (int i = 0; i < d; ++i) v(i) = u(rng);
    return v;
  };
  double worst = 0.0;
  for (int n = 0; n < samples; ++n) {
    const auto& m = catalog[static_cast<std::size_t>(n) % catalog.size()];
    const double t = 0.1 + std::abs(u(rng));  // forcing terms need t > 0
    const double h = step(rng);
    worst = std::max(worst, model_partials_gap(m, t, random_vec(m.dim), random_vec(m.dim)));
    worst = std::max(worst, midpoint_ld_gap(m, random_vec(m.dim), random_vec(m.dim), t, h));
    const auto& scheme = schemes[static_cast<std::size_t>(n) % schemes.size()];
    std::vector<Vec> nodes;
    for (int nu = 0; nu <= scheme.degree(); ++nu) nodes.push_back(random_vec(m.dim));
    worst = std::max(worst, galerkin_ld_gap(m, scheme, nodes, t, h));
  }
  return worst;
}

}  // namespace fvi::testing
