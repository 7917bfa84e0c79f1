#include "fvi/integrators.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <string>

#include "fvi/errors.hpp"

namespace fvi::integrators {

namespace {

double max_norm(const Vec& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

// Runs Newton and converts failures into StepFailure for step k.
NewtonResult solve_step(const ResidualFn& residual, const JacobianFn& jacobian, Vec guess,
                        const NewtonConfig& config, std::size_t k, const char* block) {
  try {
    return newton_solve(residual, jacobian, std::move(guess), config);
  } catch (const NewtonFailure& e) {
    throw StepFailure("step " + std::to_string(k) + " (" + block + "): " + e.what(), k,
                      e.residual(), block);
  }
}

}  // namespace

// ---------------------------------------------------------------------------

int FviProblem::effective_correction_degree() const {
  return correction_degree < 0 ? bdf_order - 1 : correction_degree;
}

void FviProblem::validate() const {
  if (!model.lagrangian || !model.dl_dq || !model.dl_dqdot)
    throw InvalidConfigurationError("model '" + model.id + "' is incomplete");
  if (x0.size() != model.dim || p0.size() != model.dim)
    throw DimensionError("initial data dimension does not match the model dimension");
  if (!(mu >= 0.0)) throw InvalidConfigurationError("damping mu must be >= 0");
  if (!(alpha >= 0.0) || !(beta >= 0.0) || !(alpha + beta <= 2.0))
    throw InvalidConfigurationError("fractional orders must satisfy alpha, beta >= 0 and "
                                    "alpha + beta <= 2");
  if (bdf_order < 1 || bdf_order > cq::kMaxBdfOrder)
    throw InvalidOrderError("BDF order must lie in 1..6, got " + std::to_string(bdf_order));
  if (steps < 1) throw InvalidConfigurationError("grid needs at least one step");
  if (!(step > 0.0)) throw InvalidConfigurationError("step h must be positive");
  if (std::abs(static_cast<double>(steps) * step - final_time) >
      1e-12 * std::max(1.0, std::abs(final_time)))
    throw InvalidConfigurationError("grid is inconsistent: N h != T");
  if (use_starting_correction) {
    const int s = effective_correction_degree();
    if (s < 0 || s > 2)
      throw InvalidConfigurationError(
          "starting correction degree must lie in 0..2 (higher degrees need nodes beyond the "
          "current step), got " + std::to_string(s));
  }
}

Vec initial_momentum(const models::LagrangianModel& model, const Vec& x0, const Vec& v0) {
  return model.dl_dqdot(0.0, x0, v0);
}

FviProblem make_problem(const models::BenchmarkCase& c, int bdf_order, double h) {
  if (!(h > 0.0)) throw InvalidConfigurationError("step h must be positive");
  const double n = std::round(c.final_time / h);
  if (n < 1.0 || std::abs(n * h - c.final_time) > 1e-12 * std::max(1.0, c.final_time))
    throw InvalidConfigurationError("step h does not divide the final time T");
  FviProblem p;
  p.model = c.model;
  p.mu = c.mu;
  p.alpha = c.alpha;
  p.beta = c.alpha;
  p.bdf_order = bdf_order;
  p.steps = static_cast<std::size_t>(n);
  p.step = h;
  p.final_time = c.final_time;
  p.x0 = c.x0;
  p.v0 = c.v0;
  p.p0 = initial_momentum(c.model, c.x0, c.v0);
  return p;
}

std::vector<Vec> Trajectory::interval_nodes(std::size_t k) const {
  std::vector<Vec> nodes;
  nodes.reserve(static_cast<std::size_t>(degree) + 1);
  nodes.push_back(x[k]);
  if (!inner.empty())
    for (const auto& v : inner[k]) nodes.push_back(v);
  nodes.push_back(x[k + 1]);
  return nodes;
}

// ---------------------------------------------------------------------------

DampingTerm::DampingTerm(const FviProblem& problem)
    : weights_(cq::cq_weights(problem.damping_order(), problem.bdf_order, problem.step,
                              problem.steps)) {
  if (problem.use_starting_correction) {
    degree_ = problem.effective_correction_degree();
    const auto sq = cq::starting_quadrature(problem.damping_order(), problem.bdf_order,
                                            problem.step, problem.steps, degree_,
                                            problem.correction_offset);
    correction_ = std::pow(problem.step, problem.damping_order()) * sq.weights;
    corrected_ = true;
  }
}

Vec DampingTerm::known_part(const std::vector<Vec>& x, std::size_t k) const {
  Vec acc = Vec::Zero(x[0].size());
  for (std::size_t n = 0; n <= k; ++n) acc += weights_.omega[n] * x[k - n];
  if (corrected_) {
    const std::size_t top = std::min<std::size_t>(k, static_cast<std::size_t>(degree_));
    for (std::size_t n = 0; n <= top; ++n)
      acc += correction_(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(n)) * x[n];
  }
  return acc;
}

double DampingTerm::next_node_coefficient(std::size_t k) const {
  if (!corrected_ || k + 1 > static_cast<std::size_t>(degree_)) return 0.0;
  return correction_(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k + 1));
}

// ---------------------------------------------------------------------------

Trajectory fvi_midpoint_run(const FviProblem& problem) {
  problem.validate();
  const auto& model = problem.model;
  const double h = problem.step;
  const std::size_t N = problem.steps;
  const int d = model.dim;
  const DampingTerm damping(problem);
  const bool analytic =
      model.has_hessian() && problem.newton.jacobian == JacobianMode::analytic;
  const Mat identity = Mat::Identity(d, d);

  Trajectory traj;
  traj.scheme = "midpoint";
  traj.step = h;
  traj.degree = 1;
  traj.x.reserve(N + 1);
  traj.x.push_back(problem.x0);
  traj.diagnostics.reserve(N);
  traj.initial_velocity = problem.v0;

  // p_{x_0} = -D_1 L_d(x_0, x_1)
  {
    const Vec& xa = traj.x[0];
    auto residual = [&](const Vec& xb) -> Vec {
      return problem.p0 + models::midpoint_ld(model, xa, xb, 0.0, h).d1;
    };
    JacobianFn jac;
    if (analytic)
      jac = [&](const Vec& xb) -> Mat { return models::midpoint_ld_hessian(model, xa, xb, 0.0, h).d12; };
    auto r = solve_step(residual, jac, xa, problem.newton, 0, "momentum");
    traj.x.push_back(r.solution);
    traj.diagnostics.push_back({r.iterations, r.residual});
  }

  for (std::size_t k = 1; k < N; ++k) {
    const double tk = problem.step * static_cast<double>(k);
    const Vec& xk = traj.x[k];
    const Vec back = models::midpoint_ld(model, traj.x[k - 1], xk, tk - h, h).d2;
    const Vec frac = problem.mu * h * damping.known_part(traj.x, k);
    const double next = problem.mu * h * damping.next_node_coefficient(k);
    auto residual = [&](const Vec& xn) -> Vec {
      return models::midpoint_ld(model, xk, xn, tk, h).d1 + back - frac - next * xn;
    };
    JacobianFn jac;
    if (analytic)
      jac = [&](const Vec& xn) -> Mat {
        return models::midpoint_ld_hessian(model, xk, xn, tk, h).d12 - next * identity;
      };
    auto r = solve_step(residual, jac, xk, problem.newton, k, "el-main");
    traj.x.push_back(r.solution);
    traj.diagnostics.push_back({r.iterations, r.residual});
  }
  return traj;
}

double midpoint_residual(const FviProblem& problem, const Trajectory& traj) {
  const auto& model = problem.model;
  const double h = problem.step;
  const DampingTerm damping(problem);
  double worst =
      max_norm(problem.p0 + models::midpoint_ld(model, traj.x[0], traj.x[1], 0.0, h).d1);
  for (std::size_t k = 1; k + 1 < traj.x.size(); ++k) {
    const double tk = h * static_cast<double>(k);
    Vec r = models::midpoint_ld(model, traj.x[k], traj.x[k + 1], tk, h).d1 +
            models::midpoint_ld(model, traj.x[k - 1], traj.x[k], tk - h, h).d2 -
            problem.mu * h *
                (damping.known_part(traj.x, k) + damping.next_node_coefficient(k) * traj.x[k + 1]);
    worst = std::max(worst, max_norm(r));
  }
  return worst;
}

// ---------------------------------------------------------------------------

namespace {

// Assembles nodes (x0, u_1..u_s) for one interval from the stacked unknowns.
std::vector<Vec> assemble_nodes(const Vec& first, const Vec& unknowns, int s, int d) {
  std::vector<Vec> nodes;
  nodes.reserve(static_cast<std::size_t>(s) + 1);
  nodes.push_back(first);
  for (int i = 0; i < s; ++i) nodes.push_back(unknowns.segment(i * d, d));
  return nodes;
}

}  // namespace

Trajectory fvi_galerkin_run(const FviProblem& problem, const models::GalerkinScheme& scheme) {
  problem.validate();
  const auto& model = problem.model;
  const double h = problem.step;
  const std::size_t N = problem.steps;
  const int d = model.dim;
  const int s = scheme.degree();
  const DampingTerm damping(problem);
  const bool analytic =
      model.has_hessian() && problem.newton.jacobian == JacobianMode::analytic;

  Trajectory traj;
  traj.scheme = "galerkin";
  traj.step = h;
  traj.degree = s;
  traj.x.reserve(N + 1);
  traj.x.push_back(problem.x0);
  traj.inner.reserve(N);
  traj.diagnostics.reserve(N);
  traj.initial_velocity = problem.v0;

  auto store = [&](const Vec& u) {
    std::vector<Vec> inner;
    for (int i = 0; i < s - 1; ++i) inner.push_back(u.segment(i * d, d));
    traj.inner.push_back(std::move(inner));
    traj.x.push_back(u.segment((s - 1) * d, d));
  };

  // Block rows: row 0 is the main-node equation, rows 1..s-1 the inner ones.
  auto residual_for = [&](const Vec& x0k, const Vec& lead, const Vec& frac, double next,
                          double tk) {
    return [&, x0k, lead, frac, next, tk](const Vec& u) -> Vec {
      const auto nodes = assemble_nodes(x0k, u, s, d);
      const auto p = models::galerkin_ld(model, scheme, nodes, tk, h);
      Vec r(s * d);
      r.segment(0, d) = lead + p.partials[0] - frac - next * u.segment((s - 1) * d, d);
      for (int i = 1; i < s; ++i) r.segment(i * d, d) = p.partials[static_cast<std::size_t>(i)];
      return r;
    };
  };
  auto jacobian_for = [&](const Vec& x0k, double next, double tk) {
    return [&, x0k, next, tk](const Vec& u) -> Mat {
      const auto nodes = assemble_nodes(x0k, u, s, d);
      const Mat H = models::galerkin_ld_hessian(model, scheme, nodes, tk, h);
      Mat J = H.block(0, d, s * d, s * d);
      J.block(0, (s - 1) * d, d, d) -= next * Mat::Identity(d, d);
      return J;
    };
  };

  // Initialization: p_{x_0} = -D_1 L_d(x_0), D_i L_d(x_0) = 0, i = 2..s.
  {
    const Vec zero = Vec::Zero(d);
    auto residual = residual_for(traj.x[0], problem.p0, zero, 0.0, 0.0);
    JacobianFn jac;
    if (analytic) jac = jacobian_for(traj.x[0], 0.0, 0.0);
    Vec guess(s * d);
    for (int i = 0; i < s; ++i) guess.segment(i * d, d) = traj.x[0];
    auto r = solve_step(residual, jac, guess, problem.newton, 0, "momentum");
    store(r.solution);
    traj.diagnostics.push_back({r.iterations, r.residual});
  }

  for (std::size_t k = 1; k < N; ++k) {
    const double tk = h * static_cast<double>(k);
    const auto prev = traj.interval_nodes(k - 1);
    const Vec lead =
        models::galerkin_ld(model, scheme, prev, tk - h, h).partials[static_cast<std::size_t>(s)];
    const Vec frac = problem.mu * h * damping.known_part(traj.x, k);
    const double next = problem.mu * h * damping.next_node_coefficient(k);
    auto residual = residual_for(traj.x[k], lead, frac, next, tk);
    JacobianFn jac;
    if (analytic) jac = jacobian_for(traj.x[k], next, tk);
    // previous interval's nodes shifted to start at x_k
    Vec guess(s * d);
    for (int i = 0; i < s; ++i)
      guess.segment(i * d, d) = prev[static_cast<std::size_t>(i) + 1] - prev[0] + traj.x[k];
    auto r = solve_step(residual, jac, guess, problem.newton, k, "el-main");
    store(r.solution);
    traj.diagnostics.push_back({r.iterations, r.residual});
  }
  return traj;
}

double galerkin_residual(const FviProblem& problem, const models::GalerkinScheme& scheme,
                         const Trajectory& traj) {
  const auto& model = problem.model;
  const double h = problem.step;
  const std::size_t s = static_cast<std::size_t>(scheme.degree());
  const DampingTerm damping(problem);
  double worst = 0.0;
  for (std::size_t k = 0; k + 1 < traj.x.size(); ++k) {
    const double tk = h * static_cast<double>(k);
    const auto p = models::galerkin_ld(model, scheme, traj.interval_nodes(k), tk, h).partials;
    for (std::size_t i = 1; i < s; ++i) worst = std::max(worst, max_norm(p[i]));
    Vec main;
    if (k == 0) {
      main = problem.p0 + p[0];
    } else {
      const auto prev =
          models::galerkin_ld(model, scheme, traj.interval_nodes(k - 1), tk - h, h).partials;
      main = prev[s] + p[0] -
             problem.mu * h *
                 (damping.known_part(traj.x, k) +
                  damping.next_node_coefficient(k) * traj.x[k + 1]);
    }
    worst = std::max(worst, max_norm(main));
  }
  return worst;
}

// ---------------------------------------------------------------------------

ReversalReport fvi_reversed_check(const FviProblem& problem, const Trajectory& traj) {
  const auto& model = problem.model;
  const double h = problem.step;
  const std::size_t N = traj.steps();
  const auto w = cq::cq_weights(problem.damping_order(), problem.bdf_order, h, N);
  std::vector<Vec> y(N + 1);
  for (std::size_t k = 0; k <= N; ++k) y[k] = traj.x[N - k];

  ReversalReport report;
  for (std::size_t k = 1; k < N; ++k) {
    const double tk = h * static_cast<double>(k);
    Vec conv = Vec::Zero(model.dim);
    for (std::size_t n = 0; k + n <= N; ++n) conv += w.omega[n] * y[k + n];
    const Vec r = models::midpoint_ld(model, y[k], y[k + 1], tk, h).d1 +
                  models::midpoint_ld(model, y[k - 1], y[k], tk - h, h).d2 -
                  problem.mu * h * conv;
    const double norm = max_norm(r);
    if (norm > report.max_residual) {
      report.max_residual = norm;
      report.worst_step = k;
    }
  }
  return report;
}

ReversalReport fvi_reversed_check(const FviProblem& problem, const models::GalerkinScheme& scheme,
                                  const Trajectory& traj) {
  const auto& model = problem.model;
  const double h = problem.step;
  const std::size_t N = traj.steps();
  const std::size_t s = static_cast<std::size_t>(scheme.degree());
  const auto w = cq::cq_weights(problem.damping_order(), problem.bdf_order, h, N);

  // interval k of y is interval N-1-k of x traversed backwards
  auto y_interval = [&](std::size_t k) {
    auto nodes = traj.interval_nodes(N - 1 - k);
    std::reverse(nodes.begin(), nodes.end());
    return nodes;
  };

  ReversalReport report;
  auto track = [&](double norm, std::size_t k) {
    if (norm > report.max_residual) {
      report.max_residual = norm;
      report.worst_step = k;
    }
  };
  for (std::size_t k = 0; k < N; ++k) {
    const double tk = h * static_cast<double>(k);
    const auto p = models::galerkin_ld(model, scheme, y_interval(k), tk, h).partials;
    for (std::size_t i = 1; i < s; ++i) track(max_norm(p[i]), k);
    if (k == 0) continue;
    const auto prev = models::galerkin_ld(model, scheme, y_interval(k - 1), tk - h, h).partials;
    Vec conv = Vec::Zero(model.dim);
    for (std::size_t n = 0; k + n <= N; ++n) conv += w.omega[n] * traj.x[N - k - n];
    track(max_norm(prev[s] + p[0] - problem.mu * h * conv), k);
  }
  return report;
}

// ---------------------------------------------------------------------------

Trajectory euler_run(const FviProblem& problem, bool implicit) {
  problem.validate();
  const auto& model = problem.model;
  const double h = problem.step;
  const std::size_t N = problem.steps;
  const int d = model.dim;
  const DampingTerm damping(problem);
  const double w0 = damping.weights().omega[0];

  Trajectory traj;
  traj.scheme = implicit ? "euler-implicit" : "euler-explicit";
  traj.step = h;
  traj.x.reserve(N + 1);
  traj.x.push_back(problem.x0);
  traj.initial_velocity = problem.v0;

  NewtonConfig cfg = problem.newton;
  cfg.jacobian = JacobianMode::finite_difference;

  // velocity consistent with p0
  auto velocity_from = [&](double t, const Vec& x, const Vec& p, const Vec& guess,
                           std::size_t k) {
    auto residual = [&](const Vec& v) -> Vec { return model.dl_dqdot(t, x, v) - p; };
    return solve_step(residual, {}, guess, cfg, k, "momentum").solution;
  };
  Vec p = problem.p0;
  Vec v = velocity_from(0.0, problem.x0, p, problem.v0.size() == d ? problem.v0 : Vec(Vec::Zero(d)), 0);

  for (std::size_t k = 0; k < N; ++k) {
    const double tk = h * static_cast<double>(k);
    if (!implicit) {
      const Vec xn = traj.x[k] + h * v;
      p = p + h * (model.dl_dq(tk, traj.x[k], v) - problem.mu * damping.known_part(traj.x, k));
      traj.x.push_back(xn);
      v = velocity_from(tk + h, xn, p, v, k + 1);
      traj.diagnostics.push_back({1, 0.0});
      continue;
    }
    // unknowns (x_{k+1}, v_{k+1})
    traj.x.push_back(traj.x[k]);
    Vec history = Vec::Zero(d);
    for (std::size_t n = 1; n <= k + 1; ++n)
      history += damping.weights().omega[n] * traj.x[k + 1 - n];
    const Vec xk = traj.x[k];
    const Vec pk = p;
    auto residual = [&](const Vec& z) -> Vec {
      const Vec xn = z.head(d), vn = z.tail(d);
      Vec r(2 * d);
      r.head(d) = xn - xk - h * vn;
      r.tail(d) = model.dl_dqdot(tk + h, xn, vn) - pk -
                  h * (model.dl_dq(tk + h, xn, vn) - problem.mu * (history + w0 * xn));
      return r;
    };
    Vec guess(2 * d);
    guess << xk, v;
    auto r = solve_step(residual, {}, guess, cfg, k + 1, "euler");
    traj.x[k + 1] = r.solution.head(d);
    v = r.solution.tail(d);
    p = model.dl_dqdot(tk + h, traj.x[k + 1], v);
    traj.diagnostics.push_back({r.iterations, r.residual});
  }
  return traj;
}

}  // namespace fvi::integrators
