#include "fvi/bench.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "fvi/errors.hpp"
#include "fvi/fracops.hpp"

namespace fvi::bench {

double global_error(const integrators::Trajectory& trajectory,
                    const std::function<Vec(double)>& exact) {
  if (!exact) throw InvalidConfigurationError("global error needs an exact solution");
  double worst = 0.0;
  for (std::size_t k = 0; k < trajectory.x.size(); ++k) {
    const Vec diff = trajectory.x[k] - exact(trajectory.time(k));
    if (diff.size() > 0) worst = std::max(worst, diff.cwiseAbs().maxCoeff());
  }
  return worst;
}

OrderReport fit_order(std::vector<double> steps, std::vector<double> errors, std::size_t tail) {
  if (steps.size() != errors.size())
    throw DimensionError("steps and errors differ in length");
  for (std::size_t i = 0; i < steps.size(); ++i)
    if (!(steps[i] > 0.0) || !(errors[i] > 0.0) || !std::isfinite(errors[i]))
      throw NumericalDegeneracyError(
          "order fit needs positive finite errors (h = " + std::to_string(steps[i]) + ")",
          errors[i]);
  const std::size_t n = steps.size();
  const std::size_t used = tail == 0 ? n : std::min(tail, n);
  if (used < 2) throw InvalidConfigurationError("order fit needs at least two points");

  OrderReport rep;
  rep.steps = std::move(steps);
  rep.errors = std::move(errors);
  for (std::size_t i = 0; i + 1 < n; ++i)
    rep.local_slopes.push_back(std::log(rep.errors[i] / rep.errors[i + 1]) /
                               std::log(rep.steps[i] / rep.steps[i + 1]));

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = n - used; i < n; ++i) {
    const double x = std::log(rep.steps[i]), y = std::log(rep.errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = static_cast<double>(used);
  const double denom = m * sxx - sx * sx;
  if (!(std::abs(denom) > 0.0)) throw NumericalDegeneracyError("step sizes are not distinct", 0.0);
  rep.slope = (m * sxy - sx * sy) / denom;
  rep.intercept = (sy - rep.slope * sx) / m;

  double ss_res = 0, ss_tot = 0;
  const double mean = sy / m;
  for (std::size_t i = n - used; i < n; ++i) {
    const double x = std::log(rep.steps[i]), y = std::log(rep.errors[i]);
    const double fit = rep.intercept + rep.slope * x;
    ss_res += (y - fit) * (y - fit);
    ss_tot += (y - mean) * (y - mean);
  }
  rep.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return rep;
}

std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::midpoint: return "midpoint";
    case Variant::galerkin: return "galerkin";
    case Variant::euler_explicit: return "euler-explicit";
    case Variant::euler_implicit: return "euler-implicit";
  }
  return "midpoint";
}

Variant parse_variant(std::string_view name) {
  for (Variant v : {Variant::midpoint, Variant::galerkin, Variant::euler_explicit,
                    Variant::euler_implicit})
    if (variant_name(v) == name) return v;
  throw InvalidConfigurationError("unknown scheme '" + std::string(name) +
                                  "' (expected midpoint, galerkin, euler-explicit or "
                                  "euler-implicit)");
}

integrators::Trajectory simulate(const ConvergenceStudy& study, double h) {
  auto problem = integrators::make_problem(study.problem, study.bdf_order, h);
  problem.use_starting_correction = study.starting_correction;
  problem.correction_degree = study.correction_degree;
  problem.correction_offset = study.correction_offset;
  problem.newton = study.newton;
  switch (study.variant) {
    case Variant::midpoint: return integrators::fvi_midpoint_run(problem);
    case Variant::galerkin:
      return integrators::fvi_galerkin_run(
          problem, models::GalerkinScheme::gauss(study.galerkin_degree, study.galerkin_points));
    case Variant::euler_explicit: return integrators::euler_run(problem, false);
    case Variant::euler_implicit: return integrators::euler_run(problem, true);
  }
  throw InvalidConfigurationError("unknown variant");
}

OrderReport run_convergence(const ConvergenceStudy& study) {
  const auto& steps = study.steps.empty() ? study.problem.steps : study.steps;
  if (steps.size() < 4)
    throw InvalidConfigurationError("a convergence study needs at least 4 step sizes");
  if (!study.problem.model.has_exact_solution())
    throw InvalidConfigurationError("model '" + study.problem.id + "' has no exact solution");
  std::vector<double> errors;
  errors.reserve(steps.size());
  for (double h : steps) {
    try {
      errors.push_back(global_error(simulate(study, h), study.problem.model.exact_solution));
    } catch (const StepFailure& e) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", h);
      throw StepFailure(std::string("h = ") + buf + ": " + e.what(), e.step(), e.residual(),
                        e.block());
    }
  }
  return fit_order(steps, std::move(errors), study.tail);
}

std::vector<double> saturation_steps() {
  std::vector<double> h;
  for (int i = 3; i <= 10; ++i) h.push_back(std::ldexp(1.0, -i));
  return h;
}

OrderReport cq_saturation_study(double beta, int p, double alpha, std::vector<double> steps,
                                std::size_t tail, double window_start) {
  if (!(window_start >= 0.0) || !(window_start < 1.0))
    throw InvalidConfigurationError("error window must start in [0, 1)");
  std::vector<double> errors;
  errors.reserve(steps.size());
  // t^{beta-1} sin t ~ t^beta vanishes at the origin for beta > 0
  auto f = [beta](double t) { return t == 0.0 ? 0.0 : std::pow(t, beta - 1.0) * std::sin(t); };
  for (double h : steps) {
    const auto N = static_cast<std::size_t>(std::llround(1.0 / h));
    const auto w = cq::cq_weights(alpha, p, h, N);
    const auto approx = cq::conv_left(w, cq::sample(f, h, N));
    double worst = 0.0;
    for (std::size_t k = 1; k <= N; ++k) {
      const double t = approx.time(k);
      if (t < window_start - 1e-12) continue;
      worst = std::max(worst,
                       std::abs(approx.values[k] - fracops::rl_integral_sin_power(alpha, beta, t)));
    }
    errors.push_back(worst);
  }
  return fit_order(std::move(steps), std::move(errors), tail);
}

cq::GridSeries energy_trace(const integrators::Trajectory& trajectory,
                            const models::LagrangianModel& model) {
  const std::size_t N = trajectory.steps();
  cq::GridSeries e{std::vector<double>(N + 1), trajectory.step, 0.0};
  if (trajectory.x.empty()) return e;
  const Vec v0 = trajectory.initial_velocity.size() == trajectory.x[0].size()
                     ? trajectory.initial_velocity
                     : Vec(Vec::Zero(trajectory.x[0].size()));
  e.values[0] = models::energy(model, trajectory.x[0], v0, 0.0);
  const double h = trajectory.step;
  for (std::size_t k = 1; k <= N; ++k) {
    const Vec q = 0.5 * (trajectory.x[k - 1] + trajectory.x[k]);
    const Vec v = (trajectory.x[k] - trajectory.x[k - 1]) / h;
    e.values[k] = models::energy(model, q, v, (static_cast<double>(k) - 0.5) * h);
  }
  return e;
}

std::vector<double> window_averages(const cq::GridSeries& trace, double window) {
  if (!(window > 0.0)) throw InvalidConfigurationError("window length must be positive");
  std::vector<double> out;
  if (trace.size() == 0) return out;
  const double t_end = trace.time(trace.size() - 1);
  for (std::size_t j = 0;; ++j) {
    const double a = static_cast<double>(j) * window, b = a + window;
    if (b > t_end + 1e-12) break;
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < trace.size(); ++k) {
      const double t = trace.time(k);
      if (t >= a - 1e-12 && t < b - 1e-12) {
        sum += trace.values[k];
        ++count;
      }
    }
    if (count == 0) break;
    out.push_back(sum / static_cast<double>(count));
  }
  return out;
}

}  // namespace fvi::bench
