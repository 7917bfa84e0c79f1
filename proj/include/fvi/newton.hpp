#pragma once

#include <functional>

#include <Eigen/Dense>

namespace fvi::integrators {

enum class JacobianMode { analytic, finite_difference };

struct NewtonConfig {
  /// Converged when the max-norm of the residual drops below this value.
  double tolerance = 1e-12;
  int max_iterations = 50;
  JacobianMode jacobian = JacobianMode::analytic;
  /// Line search halves the step at most this many times.
  int max_halvings = 20;
};

struct NewtonResult {
  Eigen::VectorXd solution;
  int iterations = 0;
  double residual = 0.0;
};

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using JacobianFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

/// Central-difference Jacobian of `residual` at x.
Eigen::MatrixXd finite_difference_jacobian(const ResidualFn& residual, const Eigen::VectorXd& x);

/// Damped Newton iteration with step halving.
///
/// An empty `jacobian`, or `config.jacobian == finite_difference`, selects the
/// central-difference Jacobian. Throws NewtonFailure when the iteration limit
/// is hit or the residual becomes non-finite, NumericalDegeneracyError for a
/// singular Jacobian.
NewtonResult newton_solve(const ResidualFn& residual, const JacobianFn& jacobian,
                          Eigen::VectorXd guess, const NewtonConfig& config = {});

}  // namespace fvi::integrators
