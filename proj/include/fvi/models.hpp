#pragma once

// Mechanical models L(t, q, qdot) and their discrete Lagrangians.

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace fvi::models {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// A Lagrangian L(t, q, qdot) on R^d with its first partials.
///
/// The second-derivative members are optional. When all three are set the
/// integrators build analytic Jacobians; otherwise they use finite differences.
struct LagrangianModel {
  using Scalar = std::function<double(double, const Vec&, const Vec&)>;
  using Vector = std::function<Vec(double, const Vec&, const Vec&)>;
  using Matrix = std::function<Mat(double, const Vec&, const Vec&)>;

  std::string id;
  int dim = 1;
  Scalar lagrangian;
  Vector dl_dq;
  Vector dl_dqdot;
  Matrix d2l_dqdq;
  Matrix d2l_dqdqdot;  // (i, j) = d^2 L / dq_i dqdot_j
  Matrix d2l_dqdotdqdot;
  std::function<Vec(double)> forcing;
  std::function<Vec(double)> exact_solution;
  /// d^2 L / dqdot^2 is invertible.
  bool regular = true;

  bool has_hessian() const { return d2l_dqdq && d2l_dqdqdot && d2l_dqdotdqdot; }
  bool has_exact_solution() const { return static_cast<bool>(exact_solution); }
};

/// L = qdot^2/2 - q^2/2 + q f(t) in one dimension; f may be empty.
LagrangianModel harmonic_oscillator(std::function<double(double)> forcing = {});

/// L = qdot^2/2 on R^d.
LagrangianModel free_particle(int dim = 1);

/// Hamiltonian energy qdot . dL/dqdot - L.
double energy(const LagrangianModel& model, const Vec& q, const Vec& qdot, double t);

// ---------------------------------------------------------------------------
// Galerkin scheme

/// Lagrange interpolation on control points d_0 = 0 < ... < d_s = 1 combined
/// with a quadrature rule (b_i, c_i) on [0, 1].
class GalerkinScheme {
 public:
  GalerkinScheme(std::vector<double> control_points, std::vector<double> nodes,
                 std::vector<double> weights);

  /// Equispaced control points of degree s with an r-point Gauss-Legendre rule.
  static GalerkinScheme gauss(int s, int r);
  /// s = 1, d = {0, 1}, one-point midpoint rule.
  static GalerkinScheme midpoint();

  int degree() const { return static_cast<int>(control_points_.size()) - 1; }
  int quadrature_size() const { return static_cast<int>(nodes_.size()); }
  const std::vector<double>& control_points() const { return control_points_; }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }

  /// l_nu(tau) and its derivative on the unit interval.
  double basis(int nu, double tau) const;
  double basis_derivative(int nu, double tau) const;

  /// Tabulated l_nu(c_i) and l'_nu(c_i); rows are quadrature points.
  const Mat& basis_table() const { return basis_; }
  const Mat& derivative_table() const { return derivative_; }

 private:
  std::vector<double> control_points_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  Mat basis_;
  Mat derivative_;
};

/// Gauss-Legendre nodes and weights mapped to [0, 1].
void gauss_legendre(int r, std::vector<double>& nodes, std::vector<double>& weights);

// ---------------------------------------------------------------------------
// Discrete Lagrangians

struct TwoPointPartials {
  double value = 0.0;
  Vec d1;
  Vec d2;
};

/// L_d = h L(t_k + h/2, (q_a+q_b)/2, (q_b-q_a)/h) with D1 and D2.
TwoPointPartials midpoint_ld(const LagrangianModel& model, const Vec& q_a, const Vec& q_b,
                             double t_k, double h);

/// Second derivatives of the midpoint L_d; needs the model Hessians.
struct TwoPointHessian {
  Mat d11, d12, d21, d22;
};
TwoPointHessian midpoint_ld_hessian(const LagrangianModel& model, const Vec& q_a,
                                    const Vec& q_b, double t_k, double h);

struct GalerkinPartials {
  double value = 0.0;
  /// partials[nu] = dL_d / dx^nu, nu = 0..s
  std::vector<Vec> partials;
};

/// L_d = h sum_i b_i L(t_k + c_i h, q_d(c_i h), qdot_d(c_i h)) and all partials.
GalerkinPartials galerkin_ld(const LagrangianModel& model, const GalerkinScheme& scheme,
                             std::span<const Vec> nodes, double t_k, double h);

/// Full ((s+1) d) x ((s+1) d) Hessian of the Galerkin L_d; needs model Hessians.
Mat galerkin_ld_hessian(const LagrangianModel& model, const GalerkinScheme& scheme,
                        std::span<const Vec> nodes, double t_k, double h);

/// Either discretization behind one interface.
class DiscreteLagrangian {
 public:
  enum class Variant { midpoint, galerkin };

  static DiscreteLagrangian midpoint(LagrangianModel model, double h);
  static DiscreteLagrangian galerkin(LagrangianModel model, GalerkinScheme scheme, double h);

  Variant variant() const { return variant_; }
  double step() const { return h_; }
  const LagrangianModel& model() const { return model_; }
  /// Number of node arguments (2 for midpoint, s+1 for Galerkin).
  int node_count() const;

  double value(std::span<const Vec> nodes, double t_k) const;
  std::vector<Vec> partials(std::span<const Vec> nodes, double t_k) const;

 private:
  DiscreteLagrangian(Variant v, LagrangianModel model, std::vector<GalerkinScheme> scheme,
                     double h);

  Variant variant_;
  LagrangianModel model_;
  std::vector<GalerkinScheme> scheme_;  // empty for midpoint
  double h_;
};

// ---------------------------------------------------------------------------
// Benchmark catalog

/// A model together with the problem data of a benchmark run.
struct BenchmarkCase {
  std::string id;
  std::string description;
  LagrangianModel model;
  /// Fractional orders alpha = beta; the damping term is D^(alpha+beta).
  double alpha = 0.5;
  double mu = 0.0;
  Vec x0;
  Vec v0;
  double final_time = 1.0;
  /// Default step sizes of convergence studies, coarsest first.
  std::vector<double> steps;
};

/// ẍ + mu ẋ + x = 0 (alpha = 1/2); exact solution available for mu < 2.
BenchmarkCase damped_oscillator(double mu = 0.2, double x0 = 0.0, double v0 = 1.2,
                                double final_time = 16.0);
/// Bagley-Torvik, alpha = 1/4, exact x = t^3.
BenchmarkCase torvik_quarter();
/// Bagley-Torvik, alpha = 3/4, exact x = t^(5/2).
BenchmarkCase torvik_three_quarters();

/// Identifiers: "damped-osc", "torvik-14", "torvik-34".
std::vector<std::string> builtin_model_ids();
BenchmarkCase builtin_model(std::string_view id);
std::vector<BenchmarkCase> builtin_models();

}  // namespace fvi::models
