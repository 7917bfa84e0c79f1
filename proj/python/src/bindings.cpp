#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "fvi/bench.hpp"
#include "fvi/cq.hpp"
#include "fvi/errors.hpp"
#include "fvi/fracops.hpp"
#include "fvi/integrators.hpp"
#include "fvi/models.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace fvi;

namespace {

cq::GridSeries series(std::vector<double> values, double h) { return {std::move(values), h, 0.0}; }

// Rows are main nodes, columns coordinates.
Eigen::MatrixXd node_matrix(const integrators::Trajectory& t) {
  const Eigen::Index d = t.x.empty() ? 0 : t.x[0].size();
  Eigen::MatrixXd out(static_cast<Eigen::Index>(t.x.size()), d);
  for (std::size_t k = 0; k < t.x.size(); ++k) out.row(static_cast<Eigen::Index>(k)) = t.x[k];
  return out;
}

bench::ConvergenceStudy make_study(const std::string& model, const std::string& scheme, int p,
                                   double mu, bool correction, int degree, double offset,
                                   int quad_points) {
  bench::ConvergenceStudy st;
  st.problem = models::builtin_model(model);
  if (mu >= 0.0) {
    // the catalog exact solutions are tied to the catalog damping
    if (model == "damped-osc") {
      st.problem = models::damped_oscillator(mu);
    } else {
      st.problem.mu = mu;
      st.problem.model.exact_solution = {};
    }
  }
  st.variant = bench::parse_variant(scheme);
  st.bdf_order = p;
  st.starting_correction = correction;
  st.correction_degree = degree;
  st.correction_offset = offset;
  st.galerkin_points = quad_points;
  return st;
}

py::dict run(const std::string& model, double h, const std::string& scheme, int p, double mu,
             bool correction, int degree, double offset, int quad_points) {
  const auto st = make_study(model, scheme, p, mu, correction, degree, offset, quad_points);
  const auto t = bench::simulate(st, h);
  const auto e = bench::energy_trace(t, st.problem.model);
  std::vector<double> times;
  for (std::size_t k = 0; k <= t.steps(); ++k) times.push_back(t.time(k));
  py::dict out("t"_a = times, "x"_a = node_matrix(t), "energy"_a = e.values);
  if (st.problem.model.has_exact_solution())
    out["error"] = bench::global_error(t, st.problem.model.exact_solution);
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Fractional variational integrators with BDF convolution quadrature";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidOrderError>(m, "InvalidOrderError", error.ptr());
  py::register_exception<InvalidConfigurationError>(m, "InvalidConfigurationError", error.ptr());
  py::register_exception<DimensionError>(m, "DimensionError", error.ptr());
  py::register_exception<NumericalDegeneracyError>(m, "NumericalDegeneracyError", error.ptr());
  py::register_exception<NewtonFailure>(m, "NewtonFailure", error.ptr());
  py::register_exception<StepFailure>(m, "StepFailure", error.ptr());

  m.def("gamma", &fracops::gamma, "x"_a);
  m.def("rl_integral_monomial", &fracops::rl_integral_monomial,
        "J^alpha of t^(beta-1) at t (negative alpha: derivative)", "alpha"_a, "beta"_a, "t"_a);
  m.def("rl_integral_sin_power", &fracops::rl_integral_sin_power,
        "J^alpha of t^(beta-1) sin t at t", "alpha"_a, "beta"_a, "t"_a);

  m.def("bdf_generating_polynomial",
        [](int p) { return cq::bdf_generating_polynomial(p).coefficients; }, "p"_a);
  m.def("cq_weights",
        [](double alpha, int p, double h, std::size_t n) { return cq::cq_weights(alpha, p, h, n).omega; },
        "omega_0..omega_N of J^alpha", "alpha"_a, "p"_a, "h"_a, "N"_a);
  m.def("conv_left",
        [](double alpha, int p, double h, std::vector<double> f) {
          const auto w = cq::cq_weights(alpha, p, h, f.empty() ? 0 : f.size() - 1);
          return cq::conv_left(w, series(std::move(f), h)).values;
        },
        "sum_{n<=k} omega_n f_{k-n}", "alpha"_a, "p"_a, "h"_a, "f"_a);
  m.def("conv_right",
        [](double alpha, int p, double h, std::vector<double> f) {
          const auto w = cq::cq_weights(alpha, p, h, f.empty() ? 0 : f.size() - 1);
          return cq::conv_right(w, series(std::move(f), h)).values;
        },
        "sum_{n<=N-k} omega_n f_{k+n}", "alpha"_a, "p"_a, "h"_a, "f"_a);
  m.def("starting_quadrature",
        [](double alpha, int p, double h, std::size_t n, int s, double offset) {
          return cq::starting_quadrature(alpha, p, h, n, s, offset).weights;
        },
        "correction weights varpi_{k,n}, rows k = 0..N", "alpha"_a, "p"_a, "h"_a, "N"_a, "s"_a,
        "offset"_a = 0.0);
  m.def("corrected_conv_left",
        [](double alpha, int p, double h, std::vector<double> f, int s, double offset) {
          const std::size_t n = f.empty() ? 0 : f.size() - 1;
          const auto w = cq::cq_weights(alpha, p, h, n);
          const auto sq = cq::starting_quadrature(alpha, p, h, n, s, offset);
          return cq::corrected_conv_left(w, sq, series(std::move(f), h)).values;
        },
        "alpha"_a, "p"_a, "h"_a, "f"_a, "s"_a, "offset"_a = 0.0);

  m.def("model_ids", &models::builtin_model_ids);
  m.def("run", &run, "integrate a catalog problem; mu < 0 keeps the catalog value",
        "model"_a, "h"_a, "scheme"_a = "midpoint", "p"_a = 1, "mu"_a = -1.0,
        "correction"_a = false, "degree"_a = -1, "offset"_a = 0.0, "quad_points"_a = 2);

  py::class_<bench::OrderReport>(m, "OrderReport")
      .def_readonly("steps", &bench::OrderReport::steps)
      .def_readonly("errors", &bench::OrderReport::errors)
      .def_readonly("slope", &bench::OrderReport::slope)
      .def_readonly("intercept", &bench::OrderReport::intercept)
      .def_readonly("r2", &bench::OrderReport::r2)
      .def_readonly("local_slopes", &bench::OrderReport::local_slopes);
  m.def("fit_order", &bench::fit_order, "steps"_a, "errors"_a, "tail"_a = 0);
  m.def("convergence",
        [](const std::string& model, const std::string& scheme, int p, std::vector<double> steps,
           std::size_t tail, bool correction, int degree, double offset, int quad_points) {
          auto st = make_study(model, scheme, p, -1.0, correction, degree, offset, quad_points);
          st.steps = std::move(steps);
          st.tail = tail;
          return bench::run_convergence(st);
        },
        "model"_a, "scheme"_a = "midpoint", "p"_a = 1, "steps"_a = std::vector<double>{},
        "tail"_a = 0, "correction"_a = false, "degree"_a = -1, "offset"_a = 0.0,
        "quad_points"_a = 2);
  m.def("saturation", &bench::cq_saturation_study, "beta"_a, "p"_a, "alpha"_a = -0.5,
        "steps"_a = bench::saturation_steps(), "tail"_a = 0, "window_start"_a = 0.0);
}
