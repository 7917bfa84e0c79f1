#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "fvi/cq.hpp"
#include "fvi/integrators.hpp"
#include "fvi/models.hpp"

namespace fvi::bench {

using Vec = Eigen::VectorXd;

/// max_k |x(t_k) - x_k| over the main nodes, max-norm in each node.
double global_error(const integrators::Trajectory& trajectory,
                    const std::function<Vec(double)>& exact);

struct OrderReport {
  std::vector<double> steps;
  std::vector<double> errors;
  /// Least-squares slope of log(error) against log(h).
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  /// local_slopes[i] uses steps i and i + 1.
  std::vector<double> local_slopes;
};

/// Fits the order on the last `tail` points (0 = all). Needs at least two
/// points in the fit and positive finite errors.
OrderReport fit_order(std::vector<double> steps, std::vector<double> errors, std::size_t tail = 0);

enum class Variant { midpoint, galerkin, euler_explicit, euler_implicit };

std::string_view variant_name(Variant v);
/// Parses "midpoint", "galerkin", "euler-explicit", "euler-implicit".
Variant parse_variant(std::string_view name);

struct ConvergenceStudy {
  models::BenchmarkCase problem;
  Variant variant = Variant::midpoint;
  int bdf_order = 1;
  /// Decreasing step sizes; empty selects problem.steps.
  std::vector<double> steps;
  bool starting_correction = false;
  int correction_degree = -1;
  double correction_offset = 0.0;
  /// Galerkin degree s and number of Gauss points.
  int galerkin_degree = 2;
  int galerkin_points = 2;
  std::size_t tail = 0;
  integrators::NewtonConfig newton;
};

/// Runs one trajectory of the study's variant on step h.
integrators::Trajectory simulate(const ConvergenceStudy& study, double h);

/// Runs the study at every step size. Step failures are rethrown with the
/// offending h in the message.
OrderReport run_convergence(const ConvergenceStudy& study);

/// Default step sizes 2^-3 .. 2^-10 of the saturation experiment.
std::vector<double> saturation_steps();

/// Error of CQ for J^alpha applied to t^{beta-1} sin t on [0, 1] against the
/// series reference, fitted over `steps`. The error is the maximum over the
/// grid points t_k >= window_start (all t_k > 0 by default). For alpha < 0 the
/// points next to the origin carry an O(h^(beta+alpha)) layer, so the
/// min(beta, p) law is only visible on a window away from 0.
OrderReport cq_saturation_study(double beta, int p, double alpha,
                                std::vector<double> steps = saturation_steps(),
                                std::size_t tail = 0, double window_start = 0.0);

/// Entry 0 is the energy of the continuous initial data; entry k >= 1 uses the
/// midpoint of interval k-1 and its difference quotient.
cq::GridSeries energy_trace(const integrators::Trajectory& trajectory,
                            const models::LagrangianModel& model);

/// Mean of the trace over consecutive windows [j w, (j+1) w); only complete
/// windows are returned.
std::vector<double> window_averages(const cq::GridSeries& trace, double window);

}  // namespace fvi::bench
