#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "fvi/errors.hpp"
#include "fvi/integrators.hpp"
#include "fvi/models.hpp"

using namespace fvi;
using namespace fvi::integrators;
using models::GalerkinScheme;

namespace {

double max_gap(const Trajectory& a, const Trajectory& b) {
  double w = 0.0;
  for (std::size_t k = 0; k < a.x.size(); ++k)
    w = std::max(w, (a.x[k] - b.x[k]).cwiseAbs().maxCoeff());
  return w;
}

double final_error(const models::BenchmarkCase& c, const Trajectory& t) {
  return std::abs(t.x.back()(0) - c.model.exact_solution(c.final_time)(0));
}

// Midpoint scheme for x'' + mu x' + x = 0 written out by hand. With
// alpha + beta = 1 and BDF1 the damping weights are 1/h, -1/h, 0, ...
std::vector<double> oscillator_oracle(double mu, double x0, double p0, double h, std::size_t n) {
  std::vector<double> x{x0};
  x.push_back((p0 - h * x0 / 4.0 + x0 / h) / (1.0 / h + h / 4.0));
  for (std::size_t k = 1; k < n; ++k) {
    const double xm = x[k - 1], xk = x[k];
    const double rest = -h * xk / 4.0 + xk / h - h * (xm + xk) / 4.0 + (xk - xm) / h;
    x.push_back((mu * (xk - xm) - rest) / (-h / 4.0 - 1.0 / h));
  }
  return x;
}

}  // namespace

TEST_CASE("midpoint run matches the hand-written recurrence") {
  const auto c = models::damped_oscillator(0.2);
  const auto p = make_problem(c, 1, 0.125);
  CHECK(p.steps == 128);
  CHECK(p.p0(0) == doctest::Approx(1.2));
  const auto t = fvi_midpoint_run(p);
  const auto o = oscillator_oracle(0.2, 0.0, 1.2, 0.125, 128);
  REQUIRE(t.x.size() == o.size());
  for (std::size_t k = 0; k < o.size(); ++k) CHECK(t.x[k](0) == doctest::Approx(o[k]).epsilon(1e-12).scale(1.0));
}

TEST_CASE("undamped midpoint conserves the discrete energy") {
  auto c = models::damped_oscillator(0.0);
  const auto t = fvi_midpoint_run(make_problem(c, 2, 0.25));
  auto e = [&](std::size_t k) {
    const double v = (t.x[k + 1](0) - t.x[k](0)) / 0.25, q = 0.5 * (t.x[k](0) + t.x[k + 1](0));
    return 0.5 * v * v + 0.5 * q * q;
  };
  for (std::size_t k = 0; k + 1 < t.x.size(); ++k) CHECK(e(k) == doctest::Approx(e(0)).epsilon(1e-12));
}

TEST_CASE("Galerkin with s = 1 and the midpoint rule reproduces the midpoint run") {
  for (int p : {1, 2, 3}) {
    const auto prob = make_problem(models::damped_oscillator(), p, 0.125);
    const auto a = fvi_midpoint_run(prob);
    const auto b = fvi_galerkin_run(prob, GalerkinScheme::midpoint());
    CHECK(max_gap(a, b) < 1e-10);
  }
}

TEST_CASE("history is causal") {
  const auto shortc = models::damped_oscillator(0.2, 0.0, 1.2, 8.0);
  const auto longc = models::damped_oscillator(0.2, 0.0, 1.2, 16.0);
  const auto a = fvi_galerkin_run(make_problem(shortc, 3, 0.125), GalerkinScheme::gauss(2, 2));
  const auto b = fvi_galerkin_run(make_problem(longc, 3, 0.125), GalerkinScheme::gauss(2, 2));
  for (std::size_t k = 0; k < a.x.size(); ++k) CHECK(a.x[k](0) == b.x[k](0));
}

TEST_CASE("damping term") {
  auto p = make_problem(models::damped_oscillator(), 1, 0.5);
  p.alpha = p.beta = 0.5;
  const DampingTerm plain(p);
  // BDF1 for order -1 is the backward difference
  CHECK(plain.weights()[0] == doctest::Approx(2.0));
  CHECK(plain.weights()[1] == doctest::Approx(-2.0));
  std::vector<Vec> x{Vec::Constant(1, 1.0), Vec::Constant(1, 4.0), Vec::Constant(1, 9.0)};
  CHECK(plain.known_part(x, 2)(0) == doctest::Approx(10.0));
  CHECK(plain.next_node_coefficient(0) == 0.0);

  p.bdf_order = 3;
  p.use_starting_correction = true;
  CHECK(p.effective_correction_degree() == 2);
  const DampingTerm corrected(p);
  CHECK(corrected.next_node_coefficient(0) != 0.0);
  CHECK(corrected.next_node_coefficient(1) != 0.0);
  CHECK(corrected.next_node_coefficient(2) == 0.0);
}

TEST_CASE("trajectories satisfy their own equations") {
  for (const auto& c : models::builtin_models())
    for (int p : {1, 2, 3}) {
      const double h = c.steps[2];
      auto prob = make_problem(c, p, h);
      const auto mid = fvi_midpoint_run(prob);
      CHECK(midpoint_residual(prob, mid) <= 10.0 * prob.newton.tolerance);
      const auto g = GalerkinScheme::gauss(2, 2);
      const auto gal = fvi_galerkin_run(prob, g);
      CHECK(galerkin_residual(prob, g, gal) <= 10.0 * prob.newton.tolerance);
      CHECK(gal.inner.size() == gal.steps());
      CHECK(gal.interval_nodes(0).size() == 3);

      prob.use_starting_correction = true;
      const auto corr = fvi_galerkin_run(prob, g);
      CHECK(galerkin_residual(prob, g, corr) <= 10.0 * prob.newton.tolerance);
      CHECK(midpoint_residual(prob, fvi_midpoint_run(prob)) <= 10.0 * prob.newton.tolerance);
    }
}

TEST_CASE("Newton converges quickly at h = 0.125") {
  const auto prob = make_problem(models::damped_oscillator(), 2, 0.125);
  for (const auto& t : {fvi_midpoint_run(prob), fvi_galerkin_run(prob, GalerkinScheme::gauss(2, 2))})
    for (const auto& d : t.diagnostics) CHECK(d.iterations <= 10);
  auto fd = prob;
  fd.newton.jacobian = JacobianMode::finite_difference;
  CHECK(max_gap(fvi_midpoint_run(prob), fvi_midpoint_run(fd)) < 1e-10);
}

TEST_CASE("time reversal") {
  const auto prob = make_problem(models::damped_oscillator(), 1, 0.125);
  const auto t = fvi_midpoint_run(prob);
  CHECK(fvi_reversed_check(prob, t).max_residual <= 1e-8);
  const auto g = GalerkinScheme::gauss(2, 2);
  CHECK(fvi_reversed_check(prob, g, fvi_galerkin_run(prob, g)).max_residual <= 1e-8);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto noise = t;
  for (auto& v : noise.x) v(0) = u(rng);
  CHECK(fvi_reversed_check(prob, noise).max_residual > 1e-2);
}

TEST_CASE("order-4 Galerkin is fourth order without damping") {
  const auto c = models::damped_oscillator(0.0);
  const auto g = GalerkinScheme::gauss(2, 2);
  const double e1 = final_error(c, fvi_galerkin_run(make_problem(c, 1, 0.25), g));
  const double e2 = final_error(c, fvi_galerkin_run(make_problem(c, 1, 0.125), g));
  CHECK(std::log2(e1 / e2) == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("Euler baselines are first order") {
  const auto c = models::damped_oscillator();
  for (bool implicit : {false, true}) {
    const double e1 = final_error(c, euler_run(make_problem(c, 1, 1.0 / 64), implicit));
    const double e2 = final_error(c, euler_run(make_problem(c, 1, 1.0 / 128), implicit));
    CHECK(std::log2(e1 / e2) == doctest::Approx(1.0).epsilon(0.1));
  }
}

TEST_CASE("validation") {
  const auto c = models::damped_oscillator();
  const auto good = make_problem(c, 2, 0.5);
  CHECK_NOTHROW(good.validate());
  auto p = good;
  p.alpha = 1.5;
  p.beta = 0.75;
  CHECK_THROWS_AS(p.validate(), InvalidConfigurationError);
  p = good;
  p.mu = -1.0;
  CHECK_THROWS_AS(p.validate(), InvalidConfigurationError);
  p = good;
  p.bdf_order = 7;
  CHECK_THROWS_AS(fvi_midpoint_run(p), InvalidOrderError);
  p = good;
  p.steps = 10;
  CHECK_THROWS_AS(p.validate(), InvalidConfigurationError);
  p = good;
  p.use_starting_correction = true;
  p.correction_degree = 3;
  CHECK_THROWS_AS(p.validate(), InvalidConfigurationError);
  p = good;
  p.x0 = Vec::Zero(2);
  CHECK_THROWS_AS(p.validate(), DimensionError);
  CHECK_THROWS_AS(make_problem(c, 1, 0.3), InvalidConfigurationError);
  CHECK_THROWS_AS(make_problem(c, 1, 0.0), InvalidConfigurationError);
}

TEST_CASE("step failures report the step and block") {
  auto p = make_problem(models::damped_oscillator(), 1, 0.5);
  p.newton.max_iterations = 0;
  try {
    fvi_midpoint_run(p);
    FAIL("expected a step failure");
  } catch (const StepFailure& e) {
    CHECK(e.step() == 0);
    CHECK(e.block() == "momentum");
  }
  CHECK_THROWS_AS(fvi_galerkin_run(p, GalerkinScheme::gauss(2, 2)), StepFailure);
}
