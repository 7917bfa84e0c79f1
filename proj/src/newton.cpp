#include "fvi/newton.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "fvi/errors.hpp"

namespace fvi::integrators {

namespace {

double max_norm(const Eigen::VectorXd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

}  // namespace

Eigen::MatrixXd finite_difference_jacobian(const ResidualFn& residual, const Eigen::VectorXd& x) {
  const Eigen::VectorXd r0 = residual(x);
  Eigen::MatrixXd J(r0.size(), x.size());
  Eigen::VectorXd xp = x;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double step = 6e-6 * std::max(1.0, std::abs(x(j)));
    xp(j) = x(j) + step;
    const Eigen::VectorXd rp = residual(xp);
    xp(j) = x(j) - step;
    const Eigen::VectorXd rm = residual(xp);
    xp(j) = x(j);
    J.col(j) = (rp - rm) / (2.0 * step);
  }
  return J;
}

NewtonResult newton_solve(const ResidualFn& residual, const JacobianFn& jacobian,
                          Eigen::VectorXd guess, const NewtonConfig& config) {
  if (!(config.tolerance > 0.0))
    throw InvalidConfigurationError("Newton tolerance must be positive");
  NewtonResult out{std::move(guess), 0, 0.0};
  Eigen::VectorXd r = residual(out.solution);
  if (r.size() != out.solution.size())
    throw DimensionError("residual dimension " + std::to_string(r.size()) +
                         " differs from unknown dimension " +
                         std::to_string(out.solution.size()));
  out.residual = max_norm(r);
  if (!std::isfinite(out.residual))
    throw NewtonFailure("non-finite residual at the initial guess", 0, out.residual);

  const bool use_fd = !jacobian || config.jacobian == JacobianMode::finite_difference;
  while (out.residual >= config.tolerance) {
    if (out.iterations >= config.max_iterations)
      throw NewtonFailure("Newton iteration limit of " + std::to_string(config.max_iterations) +
                              " reached",
                          out.iterations, out.residual);
    ++out.iterations;
    const Eigen::MatrixXd J =
        use_fd ? finite_difference_jacobian(residual, out.solution) : jacobian(out.solution);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
    if (!lu.isInvertible())
      throw NumericalDegeneracyError("singular Newton Jacobian", std::numeric_limits<double>::infinity());
    const Eigen::VectorXd delta = -lu.solve(r);
    if (!delta.allFinite())
      throw NewtonFailure("non-finite Newton update", out.iterations, out.residual);

    double lambda = 1.0;
    bool accepted = false;
    for (int halving = 0; halving <= config.max_halvings; ++halving) {
      Eigen::VectorXd trial = out.solution + lambda * delta;
      Eigen::VectorXd r_trial = residual(trial);
      const double norm = max_norm(r_trial);
      if (std::isfinite(norm) && (norm < out.residual || norm < config.tolerance)) {
        out.solution = std::move(trial);
        r = std::move(r_trial);
        out.residual = norm;
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted)
      throw NewtonFailure("line search could not reduce the residual", out.iterations,
                          out.residual);
  }
  return out;
}

}  // namespace fvi::integrators
