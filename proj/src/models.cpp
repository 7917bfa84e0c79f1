#include "fvi/models.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "fvi/errors.hpp"
#include "fvi/fracops.hpp"

namespace fvi::models {

namespace {

void check_nodes(const LagrangianModel& model, std::span<const Vec> nodes, std::size_t count) {
  if (nodes.size() != count)
    throw DimensionError("discrete Lagrangian expects " + std::to_string(count) +
                         " nodes, got " + std::to_string(nodes.size()));
  for (const auto& x : nodes)
    if (x.size() != model.dim)
      throw DimensionError("node dimension " + std::to_string(x.size()) +
                           " does not match model dimension " + std::to_string(model.dim));
}

Vec scalar(double v) { return Vec::Constant(1, v); }
Mat scalar_matrix(double v) { return Mat::Constant(1, 1, v); }

}  // namespace

LagrangianModel harmonic_oscillator(std::function<double(double)> forcing) {
  LagrangianModel m;
  m.id = forcing ? "forced-oscillator" : "oscillator";
  m.dim = 1;
  auto f = forcing ? forcing : [](double) { return 0.0; };
  m.lagrangian = [f](double t, const Vec& q, const Vec& v) {
    return 0.5 * v(0) * v(0) - 0.5 * q(0) * q(0) + q(0) * f(t);
  };
  m.dl_dq = [f](double t, const Vec& q, const Vec&) { return scalar(-q(0) + f(t)); };
  m.dl_dqdot = [](double, const Vec&, const Vec& v) { return scalar(v(0)); };
  m.d2l_dqdq = [](double, const Vec&, const Vec&) { return scalar_matrix(-1.0); };
  m.d2l_dqdqdot = [](double, const Vec&, const Vec&) { return scalar_matrix(0.0); };
  m.d2l_dqdotdqdot = [](double, const Vec&, const Vec&) { return scalar_matrix(1.0); };
  if (forcing) m.forcing = [f](double t) { return scalar(f(t)); };
  return m;
}

LagrangianModel free_particle(int dim) {
  LagrangianModel m;
  m.id = "free-particle";
  m.dim = dim;
  m.lagrangian = [](double, const Vec&, const Vec& v) { return 0.5 * v.squaredNorm(); };
  m.dl_dq = [dim](double, const Vec&, const Vec&) { return Vec(Vec::Zero(dim)); };
  m.dl_dqdot = [](double, const Vec&, const Vec& v) { return v; };
  m.d2l_dqdq = [dim](double, const Vec&, const Vec&) { return Mat(Mat::Zero(dim, dim)); };
  m.d2l_dqdqdot = [dim](double, const Vec&, const Vec&) { return Mat(Mat::Zero(dim, dim)); };
  m.d2l_dqdotdqdot = [dim](double, const Vec&, const Vec&) {
    return Mat(Mat::Identity(dim, dim));
  };
  return m;
}

double energy(const LagrangianModel& model, const Vec& q, const Vec& qdot, double t) {
  return qdot.dot(model.dl_dqdot(t, q, qdot)) - model.lagrangian(t, q, qdot);
}

// ---------------------------------------------------------------------------

void gauss_legendre(int r, std::vector<double>& nodes, std::vector<double>& weights) {
  if (r < 1) throw InvalidConfigurationError("Gauss rule needs at least one point");
  nodes.assign(static_cast<std::size_t>(r), 0.0);
  weights.assign(static_cast<std::size_t>(r), 0.0);
  for (int i = 0; i < r; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (r + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int n = 2; n <= r; ++n) {
        const double p2 = ((2.0 * n - 1.0) * x * p1 - (n - 1.0) * p0) / n;
        p0 = p1;
        p1 = p2;
      }
      dp = r * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // map [-1, 1] -> [0, 1], ascending
    nodes[static_cast<std::size_t>(r - 1 - i)] = 0.5 * (1.0 + x);
    weights[static_cast<std::size_t>(r - 1 - i)] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
}

GalerkinScheme::GalerkinScheme(std::vector<double> control_points, std::vector<double> nodes,
                               std::vector<double> weights)
    : control_points_(std::move(control_points)),
      nodes_(std::move(nodes)),
      weights_(std::move(weights)) {
  const int s = degree();
  if (s < 1) throw InvalidConfigurationError("Galerkin degree must be >= 1");
  if (control_points_.front() != 0.0 || control_points_.back() != 1.0)
    throw InvalidConfigurationError("control points must start at 0 and end at 1");
  for (int i = 1; i <= s; ++i)
    if (!(control_points_[i] > control_points_[i - 1]))
      throw InvalidConfigurationError("control points must be strictly increasing");
  if (nodes_.empty() || nodes_.size() != weights_.size())
    throw InvalidConfigurationError("quadrature nodes and weights must have equal, nonzero size");
  double total = 0.0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i] < 0.0 || nodes_[i] > 1.0)
      throw InvalidConfigurationError("quadrature nodes must lie in [0, 1]");
    total += weights_[i];
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw InvalidConfigurationError("quadrature weights must sum to 1");

  const int r = quadrature_size();
  basis_.resize(r, s + 1);
  derivative_.resize(r, s + 1);
  for (int i = 0; i < r; ++i)
    for (int nu = 0; nu <= s; ++nu) {
      basis_(i, nu) = basis(nu, nodes_[i]);
      derivative_(i, nu) = basis_derivative(nu, nodes_[i]);
    }
}

GalerkinScheme GalerkinScheme::gauss(int s, int r) {
  if (s < 1) throw InvalidConfigurationError("Galerkin degree must be >= 1");
  std::vector<double> d(static_cast<std::size_t>(s) + 1);
  for (int i = 0; i <= s; ++i) d[i] = static_cast<double>(i) / s;
  d.back() = 1.0;
  std::vector<double> c, b;
  gauss_legendre(r, c, b);
  return GalerkinScheme(std::move(d), std::move(c), std::move(b));
}

GalerkinScheme GalerkinScheme::midpoint() { return GalerkinScheme({0.0, 1.0}, {0.5}, {1.0}); }

double GalerkinScheme::basis(int nu, double tau) const {
  double v = 1.0;
  for (int j = 0; j <= degree(); ++j)
    if (j != nu) v *= (tau - control_points_[j]) / (control_points_[nu] - control_points_[j]);
  return v;
}

double GalerkinScheme::basis_derivative(int nu, double tau) const {
  double sum = 0.0;
  for (int m = 0; m <= degree(); ++m) {
    if (m == nu) continue;
    double term = 1.0 / (control_points_[nu] - control_points_[m]);
    for (int j = 0; j <= degree(); ++j)
      if (j != nu && j != m)
        term *= (tau - control_points_[j]) / (control_points_[nu] - control_points_[j]);
    sum += term;
  }
  return sum;
}

// ---------------------------------------------------------------------------

TwoPointPartials midpoint_ld(const LagrangianModel& model, const Vec& q_a, const Vec& q_b,
                             double t_k, double h) {
  if (!(h > 0.0)) throw InvalidConfigurationError("step h must be positive");
  if (q_a.size() != model.dim || q_b.size() != model.dim)
    throw DimensionError("midpoint_ld node dimension mismatch");
  const double t = t_k + 0.5 * h;
  const Vec q = 0.5 * (q_a + q_b);
  const Vec v = (q_b - q_a) / h;
  const Vec lq = model.dl_dq(t, q, v);
  const Vec lv = model.dl_dqdot(t, q, v);
  TwoPointPartials out;
  out.value = h * model.lagrangian(t, q, v);
  out.d1 = h * (0.5 * lq - lv / h);
  out.d2 = h * (0.5 * lq + lv / h);
  return out;
}

TwoPointHessian midpoint_ld_hessian(const LagrangianModel& model, const Vec& q_a,
                                    const Vec& q_b, double t_k, double h) {
  if (!model.has_hessian())
    throw InvalidConfigurationError("model '" + model.id + "' provides no second derivatives");
  const double t = t_k + 0.5 * h;
  const Vec q = 0.5 * (q_a + q_b);
  const Vec v = (q_b - q_a) / h;
  const Mat lqq = model.d2l_dqdq(t, q, v);
  const Mat lqv = model.d2l_dqdqdot(t, q, v);
  const Mat lvq = lqv.transpose();
  const Mat lvv = model.d2l_dqdotdqdot(t, q, v);
  // d/dq_a of (Lq, Lv) and d/dq_b of (Lq, Lv)
  const Mat lq_a = 0.5 * lqq - lqv / h;
  const Mat lq_b = 0.5 * lqq + lqv / h;
  const Mat lv_a = 0.5 * lvq - lvv / h;
  const Mat lv_b = 0.5 * lvq + lvv / h;
  TwoPointHessian H;
  H.d11 = h * (0.5 * lq_a - lv_a / h);
  H.d12 = h * (0.5 * lq_b - lv_b / h);
  H.d21 = h * (0.5 * lq_a + lv_a / h);
  H.d22 = h * (0.5 * lq_b + lv_b / h);
  return H;
}

GalerkinPartials galerkin_ld(const LagrangianModel& model, const GalerkinScheme& scheme,
                             std::span<const Vec> nodes, double t_k, double h) {
  const int s = scheme.degree();
  check_nodes(model, nodes, static_cast<std::size_t>(s) + 1);
  if (!(h > 0.0)) throw InvalidConfigurationError("step h must be positive");
  const Mat& l = scheme.basis_table();
  const Mat& dl = scheme.derivative_table();

  GalerkinPartials out;
  out.partials.assign(static_cast<std::size_t>(s) + 1, Vec::Zero(model.dim));
  for (int i = 0; i < scheme.quadrature_size(); ++i) {
    Vec q = Vec::Zero(model.dim);
    Vec v = Vec::Zero(model.dim);
    for (int nu = 0; nu <= s; ++nu) {
      q += l(i, nu) * nodes[nu];
      v += dl(i, nu) * nodes[nu];
    }
    v /= h;
    const double t = t_k + scheme.nodes()[i] * h;
    const double hb = h * scheme.weights()[i];
    out.value += hb * model.lagrangian(t, q, v);
    const Vec lq = model.dl_dq(t, q, v);
    const Vec lv = model.dl_dqdot(t, q, v);
    for (int nu = 0; nu <= s; ++nu) out.partials[nu] += hb * (l(i, nu) * lq + dl(i, nu) / h * lv);
  }
  return out;
}

Mat galerkin_ld_hessian(const LagrangianModel& model, const GalerkinScheme& scheme,
                        std::span<const Vec> nodes, double t_k, double h) {
  if (!model.has_hessian())
    throw InvalidConfigurationError("model '" + model.id + "' provides no second derivatives");
  const int s = scheme.degree();
  const int d = model.dim;
  check_nodes(model, nodes, static_cast<std::size_t>(s) + 1);
  const Mat& l = scheme.basis_table();
  const Mat& dl = scheme.derivative_table();

  Mat H = Mat::Zero((s + 1) * d, (s + 1) * d);
  for (int i = 0; i < scheme.quadrature_size(); ++i) {
    Vec q = Vec::Zero(d);
    Vec v = Vec::Zero(d);
    for (int nu = 0; nu <= s; ++nu) {
      q += l(i, nu) * nodes[nu];
      v += dl(i, nu) * nodes[nu];
    }
    v /= h;
    const double t = t_k + scheme.nodes()[i] * h;
    const double hb = h * scheme.weights()[i];
    const Mat lqq = model.d2l_dqdq(t, q, v);
    const Mat lqv = model.d2l_dqdqdot(t, q, v);
    const Mat lvv = model.d2l_dqdotdqdot(t, q, v);
    for (int nu = 0; nu <= s; ++nu)
      for (int la = 0; la <= s; ++la) {
        const double a = l(i, nu), da = dl(i, nu) / h;
        const double b = l(i, la), db = dl(i, la) / h;
        H.block(nu * d, la * d, d, d) +=
            hb * (a * b * lqq + a * db * lqv + da * b * lqv.transpose() + da * db * lvv);
      }
  }
  return H;
}

// ---------------------------------------------------------------------------

DiscreteLagrangian::DiscreteLagrangian(Variant v, LagrangianModel model,
                                       std::vector<GalerkinScheme> scheme, double h)
    : variant_(v), model_(std::move(model)), scheme_(std::move(scheme)), h_(h) {
  if (!(h_ > 0.0)) throw InvalidConfigurationError("step h must be positive");
}

DiscreteLagrangian DiscreteLagrangian::midpoint(LagrangianModel model, double h) {
  return DiscreteLagrangian(Variant::midpoint, std::move(model), {}, h);
}

DiscreteLagrangian DiscreteLagrangian::galerkin(LagrangianModel model, GalerkinScheme scheme,
                                                double h) {
  std::vector<GalerkinScheme> s;
  s.push_back(std::move(scheme));
  return DiscreteLagrangian(Variant::galerkin, std::move(model), std::move(s), h);
}

int DiscreteLagrangian::node_count() const {
  return variant_ == Variant::midpoint ? 2 : scheme_.front().degree() + 1;
}

double DiscreteLagrangian::value(std::span<const Vec> nodes, double t_k) const {
  if (variant_ == Variant::midpoint) {
    check_nodes(model_, nodes, 2);
    return midpoint_ld(model_, nodes[0], nodes[1], t_k, h_).value;
  }
  return galerkin_ld(model_, scheme_.front(), nodes, t_k, h_).value;
}

std::vector<Vec> DiscreteLagrangian::partials(std::span<const Vec> nodes, double t_k) const {
  if (variant_ == Variant::midpoint) {
    check_nodes(model_, nodes, 2);
    auto p = midpoint_ld(model_, nodes[0], nodes[1], t_k, h_);
    return {p.d1, p.d2};
  }
  return galerkin_ld(model_, scheme_.front(), nodes, t_k, h_).partials;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<double> dyadic_steps(double length, int first, int last) {
  std::vector<double> steps;
  for (int i = first; i <= last; ++i) steps.push_back(length / std::ldexp(1.0, i));
  return steps;
}

}  // namespace

BenchmarkCase damped_oscillator(double mu, double x0, double v0, double final_time) {
  BenchmarkCase c;
  c.id = "damped-osc";
  c.description = "damped harmonic oscillator x'' + mu D^1 x + x = 0";
  c.model = harmonic_oscillator();
  c.model.id = c.id;
  c.alpha = 0.5;
  c.mu = mu;
  c.x0 = scalar(x0);
  c.v0 = scalar(v0);
  c.final_time = final_time;
  c.steps = dyadic_steps(16.0, 4, 11);
  if (mu >= 0.0 && mu < 2.0) {
    const double w = std::sqrt(1.0 - 0.25 * mu * mu);
    c.model.exact_solution = [=](double t) {
      return scalar(std::exp(-0.5 * mu * t) *
                    (x0 * std::cos(w * t) + (v0 + 0.5 * mu * x0) / w * std::sin(w * t)));
    };
  }
  return c;
}

BenchmarkCase torvik_quarter() {
  BenchmarkCase c;
  c.id = "torvik-14";
  c.description = "Bagley-Torvik, alpha = 1/4, exact x = t^3";
  const double coeff = 3.2 / fracops::gamma(0.5);
  c.model = harmonic_oscillator(
      [coeff](double t) { return t * t * t + 6.0 * t + coeff * t * t * std::sqrt(t); });
  c.model.id = c.id;
  c.model.exact_solution = [](double t) { return scalar(t * t * t); };
  c.alpha = 0.25;
  c.mu = 1.0;
  c.x0 = scalar(0.0);
  c.v0 = scalar(0.0);
  c.final_time = 1.0;
  c.steps = dyadic_steps(1.0, 1, 8);
  return c;
}

BenchmarkCase torvik_three_quarters() {
  BenchmarkCase c;
  c.id = "torvik-34";
  c.description = "Bagley-Torvik, alpha = 3/4, exact x = t^(5/2)";
  const double sqrt_pi = std::sqrt(std::numbers::pi);
  c.model = harmonic_oscillator([sqrt_pi](double t) {
    return 3.75 * std::sqrt(t) + 1.875 * sqrt_pi * t + t * t * std::sqrt(t);
  });
  c.model.id = c.id;
  c.model.exact_solution = [](double t) { return scalar(t * t * std::sqrt(t)); };
  c.alpha = 0.75;
  c.mu = 1.0;
  c.x0 = scalar(0.0);
  c.v0 = scalar(0.0);
  c.final_time = 1.0;
  c.steps = dyadic_steps(1.0, 1, 8);
  return c;
}

std::vector<std::string> builtin_model_ids() { return {"damped-osc", "torvik-14", "torvik-34"}; }

BenchmarkCase builtin_model(std::string_view id) {
  if (id == "damped-osc") return damped_oscillator();
  if (id == "torvik-14") return torvik_quarter();
  if (id == "torvik-34") return torvik_three_quarters();
  throw InvalidConfigurationError("unknown model id '" + std::string(id) +
                                  "' (expected damped-osc, torvik-14 or torvik-34)");
}

std::vector<BenchmarkCase> builtin_models() {
  return {damped_oscillator(), torvik_quarter(), torvik_three_quarters()};
}

}  // namespace fvi::models
