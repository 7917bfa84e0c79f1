#pragma once

// Fractional variational integrators (FVI).
//
// Both schemes step the discrete restricted Euler-Lagrange equations of the
// x-trajectory,
//
//   D_{last} L_d(previous interval) + D_1 L_d(current interval)
//       = mu h sum_{n=0}^{k} omega_n x_{k-n},
//
// where omega are the CQ weights of J^{-(alpha+beta)}. Only main nodes enter
// the convolution; inner Galerkin nodes are solved together with the next
// main node.

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fvi/cq.hpp"
#include "fvi/models.hpp"
#include "fvi/newton.hpp"

namespace fvi::integrators {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct FviProblem {
  models::LagrangianModel model;
  double mu = 0.0;
  double alpha = 0.5;
  double beta = 0.5;
  int bdf_order = 1;
  std::size_t steps = 0;  // N
  double step = 0.0;      // h
  double final_time = 0.0;
  Vec x0;
  /// Initial discrete momentum p_{x_0}.
  Vec p0;
  /// Continuous initial velocity; only used for diagnostics (energy at t = 0).
  Vec v0;
  bool use_starting_correction = false;
  /// Degree of the starting quadrature; negative selects bdf_order - 1.
  int correction_degree = -1;
  /// Exponent offset of the correction basis, see cq::starting_quadrature.
  double correction_offset = 0.0;
  NewtonConfig newton;

  /// Order of the discrete operator in the damping term, -(alpha + beta).
  double damping_order() const { return -(alpha + beta); }
  int effective_correction_degree() const;
  /// Throws InvalidConfigurationError on inconsistent data.
  void validate() const;
};

/// p = dL/dqdot(0, x0, v0).
Vec initial_momentum(const models::LagrangianModel& model, const Vec& x0, const Vec& v0);

/// Problem for a catalog case on a grid of step h (N = T / h, rounded).
FviProblem make_problem(const models::BenchmarkCase& c, int bdf_order, double h);

struct StepDiagnostics {
  int iterations = 0;
  double residual = 0.0;
};

struct Trajectory {
  std::string scheme;
  double step = 0.0;
  /// Polynomial degree s (1 for midpoint).
  int degree = 1;
  /// Main nodes x_0..x_N.
  std::vector<Vec> x;
  /// inner[k] holds x_k^1..x_k^{s-1} of interval k; empty for midpoint.
  std::vector<std::vector<Vec>> inner;
  /// diagnostics[0] is the initialization solve, diagnostics[k] step k.
  std::vector<StepDiagnostics> diagnostics;
  Vec initial_velocity;

  std::size_t steps() const { return x.empty() ? 0 : x.size() - 1; }
  double time(std::size_t k) const { return static_cast<double>(k) * step; }
  /// x_k^0, ..., x_k^s with x_k^s = x_{k+1}.
  std::vector<Vec> interval_nodes(std::size_t k) const;
};

/// Fractional damping term of the scheme at step k (including the starting
/// correction when enabled).
class DampingTerm {
 public:
  explicit DampingTerm(const FviProblem& problem);

  /// Part of the term that depends on x_0..x_k only.
  Vec known_part(const std::vector<Vec>& x, std::size_t k) const;
  /// Coefficient multiplying x_{k+1} in the term (nonzero only with the
  /// correction for k + 1 <= degree).
  double next_node_coefficient(std::size_t k) const;
  const cq::CqWeights& weights() const { return weights_; }

 private:
  cq::CqWeights weights_;
  bool corrected_ = false;
  Eigen::MatrixXd correction_;  // h^alpha * varpi
  int degree_ = -1;
};

/// Midpoint discrete Lagrangian with CQ damping.
Trajectory fvi_midpoint_run(const FviProblem& problem);

/// Galerkin discrete Lagrangian with CQ damping: initialization from p_{x_0},
/// then one system in the s unknowns x_k^1..x_k^s per step.
Trajectory fvi_galerkin_run(const FviProblem& problem, const models::GalerkinScheme& scheme);

/// Max-norm of all discrete Euler-Lagrange residuals along a midpoint
/// trajectory, including the momentum initialization.
double midpoint_residual(const FviProblem& problem, const Trajectory& trajectory);
/// Same for a Galerkin trajectory.
double galerkin_residual(const FviProblem& problem, const models::GalerkinScheme& scheme,
                         const Trajectory& trajectory);

struct ReversalReport {
  double max_residual = 0.0;
  std::size_t worst_step = 0;
};

/// Substitutes y_k = x_{N-k} into the y-equations (right convolution) and
/// reports the largest residual over k = 1..N-1. Meaningful for autonomous
/// Lagrangians that are even in the velocity. Uses the uncorrected weights.
ReversalReport fvi_reversed_check(const FviProblem& problem, const Trajectory& trajectory);
/// Galerkin variant; inner nodes of the reversed intervals are reversed too.
ReversalReport fvi_reversed_check(const FviProblem& problem, const models::GalerkinScheme& scheme,
                                  const Trajectory& trajectory);

/// Explicit or implicit Euler on the first-order (x, p) form with the CQ
/// damping term; comparison baseline for the variational schemes.
Trajectory euler_run(const FviProblem& problem, bool implicit);

}  // namespace fvi::integrators
