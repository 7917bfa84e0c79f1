#include "fvi/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "fvi/bench.hpp"
#include "fvi/cq.hpp"
#include "fvi/errors.hpp"
#include "fvi/fracops.hpp"
#include "fvi/integrators.hpp"
#include "fvi/models.hpp"

namespace fvi::cli {

namespace {

struct Options {
  std::string config;
  std::string output;

  // weights / fracderiv
  double alpha = 0.5;
  int p = 1;
  double h = 1.0;
  std::size_t n_steps = 16;
  std::string function = "t";
  double beta = 1.0;
  double exponent = 1.0;
  double final_time = 1.0;
  bool corrected = false;
  int degree = -1;
  double offset = 0.0;
  int quad_points = 2;

  // run / convergence
  std::string model = "damped-osc";
  std::string scheme = "midpoint";
  std::vector<int> p_list{1, 2, 3};
  std::vector<double> h_list;
  std::size_t tail = 0;
  double mu = 0.0;
  double tolerance = 1e-12;
  int max_iterations = 50;
};

// Validators whose messages carry the accepted range; CLI11 prefixes the flag.
const CLI::Validator kFinite(
    [](std::string& s) -> std::string {
      double v = 0;
      if (!CLI::detail::lexical_cast(s, v) || !std::isfinite(v))
        return "value " + s + " is not a finite real number (accepted: any finite real)";
      return {};
    },
    "FINITE");

CLI::Validator positive(const std::string& what = "a real > 0") {
  return CLI::Validator(
      [what](std::string& s) -> std::string {
        double v = 0;
        if (!CLI::detail::lexical_cast(s, v) || !(v > 0.0) || !std::isfinite(v))
          return "value " + s + " out of range (accepted: " + what + ")";
        return {};
      },
      "POSITIVE");
}

CLI::Validator int_range(long lo, long hi) {
  return CLI::Validator(
      [lo, hi](std::string& s) -> std::string {
        long v = 0;
        if (!CLI::detail::lexical_cast(s, v) || v < lo || v > hi)
          return "value " + s + " out of range (accepted: integers " + std::to_string(lo) +
                 ".." + std::to_string(hi) + ")";
        return {};
      },
      "INT in [" + std::to_string(lo) + "," + std::to_string(hi) + "]");
}

CLI::Validator real_range(double lo, double hi, const std::string& text) {
  return CLI::Validator(
      [lo, hi, text](std::string& s) -> std::string {
        double v = 0;
        if (!CLI::detail::lexical_cast(s, v) || !(v >= lo) || !(v <= hi))
          return "value " + s + " out of range (accepted: " + text + ")";
        return {};
      },
      "REAL in " + text);
}

CLI::Validator one_of(std::vector<std::string> names) {
  std::string list;
  for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
  return CLI::Validator(
      [names, list](std::string& s) -> std::string {
        if (std::find(names.begin(), names.end(), s) == names.end())
          return "value '" + s + "' not accepted (accepted: " + list + ")";
        return {};
      },
      "{" + list + "}");
}

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void build(CLI::App& app, Options& o) {
  // "-h" would clash with the step-size flag
  app.set_help_flag("--help", "print help and exit");
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--config", o.config, "key=value file; command-line flags take precedence");

  auto output = [&o](CLI::App* sub) {
    sub->add_option("--output,-o", o.output, "CSV destination (default: stdout)");
  };
  auto newton = [&o](CLI::App* sub) {
    sub->add_option("--tol", o.tolerance, "Newton tolerance")->check(positive());
    sub->add_option("--max-iter", o.max_iterations, "Newton iteration limit")
        ->check(int_range(1, 10000));
  };

  auto* w = app.add_subcommand("weights", "CQ weights omega_n of J^alpha");
  w->add_option("--alpha", o.alpha, "operator order (negative for derivatives)")->check(kFinite);
  w->add_option("--p", o.p, "BDF order")->check(int_range(1, 6));
  w->add_option("--h", o.h, "step size")->check(positive());
  w->add_option("--N", o.n_steps, "largest index n")->check(int_range(0, 10000000));
  output(w);

  auto* f = app.add_subcommand("fracderiv", "CQ approximation of J^alpha f against the exact value");
  f->add_option("--function", o.function, "t | power | sin-power")
      ->check(one_of({"t", "power", "sin-power"}));
  f->add_option("--exponent", o.exponent, "q in f = t^q for 'power'")
      ->check(real_range(0.0, 1e6, "a real >= 0"));
  f->add_option("--beta", o.beta, "beta in f = t^(beta-1) sin t for 'sin-power'")
      ->check(positive());
  f->add_option("--alpha", o.alpha, "operator order (negative for derivatives)")
      ->check(real_range(-2.0, 1e6, "a real >= -2"));
  f->add_option("--p", o.p, "BDF order")->check(int_range(1, 6));
  f->add_option("--h", o.h, "step size")->check(positive());
  f->add_option("--T", o.final_time, "final time")->check(positive());
  f->add_flag("--corrected", o.corrected, "add the starting quadrature");
  f->add_option("--degree", o.degree, "starting quadrature degree (default p-1)")
      ->check(int_range(0, 6));
  f->add_option("--offset", o.offset, "exponent offset of the correction basis")
      ->check(real_range(0.0, 100.0, "a real in [0, 100]"));
  output(f);

  const auto ids = models::builtin_model_ids();
  const std::vector<std::string> schemes{"midpoint", "galerkin", "euler-explicit",
                                         "euler-implicit"};

  auto* r = app.add_subcommand("run", "integrate one benchmark problem");
  r->add_option("--model", o.model, "benchmark id")->check(one_of(ids));
  r->add_option("--scheme", o.scheme, "integrator")->check(one_of(schemes));
  r->add_option("--quad-points", o.quad_points, "Gauss points of the galerkin scheme")
      ->check(int_range(1, 20));
  r->add_option("--p", o.p, "BDF order of the damping term")->check(int_range(1, 6));
  auto* rh = r->add_option("--h", o.h, "step size")->check(positive());
  auto* rn = r->add_option("--N", o.n_steps, "number of steps")->check(int_range(1, 10000000));
  rh->excludes(rn);
  r->add_option("--T", o.final_time, "final time (default: the model's)")->check(positive());
  r->add_option("--alpha", o.alpha, "fractional order alpha = beta (default: the model's)")
      ->check(real_range(0.0, 1.0, "a real in [0, 1]"));
  r->add_option("--mu", o.mu, "damping coefficient (default: the model's)")
      ->check(real_range(0.0, 1e6, "a real >= 0"));
  r->add_flag("--correction", o.corrected, "add the starting quadrature to the damping term");
  r->add_option("--degree", o.degree, "starting quadrature degree (default p-1)")
      ->check(int_range(0, 2));
  r->add_option("--offset", o.offset, "exponent offset of the correction basis")
      ->check(real_range(0.0, 100.0, "a real in [0, 100]"));
  newton(r);
  output(r);

  auto* c = app.add_subcommand("convergence", "global errors and fitted orders");
  c->add_option("--model", o.model, "benchmark id")->check(one_of(ids));
  c->add_option("--scheme", o.scheme, "integrator")->check(one_of(schemes));
  c->add_option("--quad-points", o.quad_points, "Gauss points of the galerkin scheme")
      ->check(int_range(1, 20));
  c->add_option("--p", o.p_list, "comma-separated BDF orders")
      ->delimiter(',')
      ->check(int_range(1, 6));
  c->add_option("--h", o.h_list, "comma-separated step sizes (default: the model's)")
      ->delimiter(',')
      ->check(positive());
  c->add_option("--tail", o.tail, "fit only the last n points (0 = all)")
      ->check(int_range(0, 1000));
  c->add_option("--mu", o.mu, "damping coefficient (default: the model's)")
      ->check(real_range(0.0, 1e6, "a real >= 0"));
  c->add_flag("--correction", o.corrected, "add the starting quadrature to the damping term");
  c->add_option("--degree", o.degree, "starting quadrature degree (default p-1)")
      ->check(int_range(0, 2));
  c->add_option("--offset", o.offset, "exponent offset of the correction basis")
      ->check(real_range(0.0, 100.0, "a real in [0, 100]"));
  newton(c);
  output(c);
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// Arguments for config keys that were not given on the command line.
std::vector<std::string> config_arguments(const std::string& path, CLI::App& parsed) {
  std::ifstream in(path);
  if (!in) throw UsageError("--config: cannot read file '" + path + "'");
  auto subs = parsed.get_subcommands();
  CLI::App* sub = subs.empty() ? &parsed : subs.front();
  std::vector<std::string> extra;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError("--config: line " + std::to_string(lineno) + " is not key=value");
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    while (!key.empty() && key[0] == '-') key.erase(0, 1);
    if (key == "config")
      throw UsageError("--config: a config file cannot name another config file");
    CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (opt == nullptr)
      throw UsageError("--config: unknown key '" + key + "' for subcommand '" + sub->get_name() +
                       "'");
    if (opt->count() > 0) continue;
    // an excluded partner given on the command line wins as well
    bool excluded = false;
    for (const CLI::Option* other : opt->get_excludes()) excluded = excluded || other->count() > 0;
    if (!excluded) extra.push_back("--" + key + "=" + value);
  }
  return extra;
}

void parse(CLI::App& app, std::vector<std::string> args) {
  std::reverse(args.begin(), args.end());
  app.parse(args);
}

// ---------------------------------------------------------------------------

void write_row(std::ostream& os, std::initializer_list<std::string> cells) {
  bool first = true;
  for (const auto& c : cells) {
    if (!first) os << ',';
    os << c;
    first = false;
  }
  os << '\n';
}

std::string fmt(double v) { return format_number(v); }
std::string fmt(std::size_t v) { return std::to_string(v); }
std::string fmt(int v) { return std::to_string(v); }

void cmd_weights(const Options& o, std::ostream& csv) {
  const auto w = cq::cq_weights(o.alpha, o.p, o.h, o.n_steps);
  write_row(csv, {"n", "omega"});
  for (std::size_t n = 0; n < w.omega.size(); ++n) write_row(csv, {fmt(n), fmt(w[n])});
}

std::size_t steps_for(double T, double h, const char* h_flag) {
  const double n = std::round(T / h);
  if (n < 1.0 || std::abs(n * h - T) > 1e-12 * std::max(1.0, T))
    throw UsageError(std::string(h_flag) + ": step must divide --T = " + fmt(T) +
                     " into an integer number of steps (accepted: T/n, n >= 1)");
  return static_cast<std::size_t>(n);
}

void cmd_fracderiv(const Options& o, std::ostream& csv) {
  const std::size_t N = steps_for(o.final_time, o.h, "--h");
  std::function<double(double)> f, exact;
  if (o.function == "t" || o.function == "power") {
    const double q = o.function == "t" ? 1.0 : o.exponent;
    const fracops::PowerFunction pf(q + 1.0);
    f = pf;
    exact = [a = o.alpha, q](double t) { return fracops::rl_integral_monomial(a, q + 1.0, t); };
  } else {
    const double b = o.beta;
    f = [b](double t) { return t == 0.0 ? 0.0 : std::pow(t, b - 1.0) * std::sin(t); };
    exact = [a = o.alpha, b](double t) { return fracops::rl_integral_sin_power(a, b, t); };
  }
  const auto w = cq::cq_weights(o.alpha, o.p, o.h, N);
  const auto samples = cq::sample(f, o.h, N);
  cq::GridSeries approx;
  if (o.corrected) {
    const int s = o.degree < 0 ? o.p - 1 : o.degree;
    if (static_cast<std::size_t>(s) > N)
      throw UsageError("--degree: must not exceed the number of steps (accepted: 0.." +
                       std::to_string(std::min<std::size_t>(N, 6)) + ")");
    approx = cq::corrected_conv_left(w, cq::starting_quadrature(o.alpha, o.p, o.h, N, s, o.offset),
                                     samples);
  } else {
    approx = cq::conv_left(w, samples);
  }
  write_row(csv, {"t", "approx", "exact", "error"});
  for (std::size_t k = 0; k <= N; ++k) {
    const double t = approx.time(k), e = exact(t);
    write_row(csv, {fmt(t), fmt(approx.values[k]), fmt(e), fmt(std::abs(approx.values[k] - e))});
  }
}

struct ResolvedCase {
  models::BenchmarkCase c;
  bool exact = true;
};

bool given(CLI::App& sub, const std::string& name) {
  const CLI::Option* opt = sub.get_option_no_throw(name);
  return opt != nullptr && opt->count() > 0;
}

ResolvedCase resolve_case(const Options& o, CLI::App& sub) {
  ResolvedCase r{models::builtin_model(o.model), true};
  const bool mu_given = given(sub, "--mu"), alpha_given = given(sub, "--alpha");
  const bool t_given = given(sub, "--T");
  if (o.model == "damped-osc" && (mu_given || t_given)) {
    const double mu = mu_given ? o.mu : r.c.mu;
    const double T = t_given ? o.final_time : r.c.final_time;
    if (mu >= 2.0) {
      r.c = models::damped_oscillator(1.0, r.c.x0[0], r.c.v0[0], T);
      r.c.mu = mu;
      r.exact = false;
    } else {
      r.c = models::damped_oscillator(mu, r.c.x0[0], r.c.v0[0], T);
    }
  } else {
    if (mu_given) {
      r.c.mu = o.mu;
      r.exact = false;
    }
    if (t_given) r.c.final_time = o.final_time;
  }
  if (alpha_given) {
    r.exact = r.exact && o.alpha == r.c.alpha;
    r.c.alpha = o.alpha;
  }
  r.exact = r.exact && r.c.model.has_exact_solution();
  return r;
}

integrators::NewtonConfig newton_config(const Options& o) {
  integrators::NewtonConfig cfg;
  cfg.tolerance = o.tolerance;
  cfg.max_iterations = o.max_iterations;
  return cfg;
}

void check_correction(const Options& o, int p) {
  if (!o.corrected) return;
  const int s = o.degree < 0 ? p - 1 : o.degree;
  if (s > 2)
    throw UsageError("--degree: default degree p-1 = " + std::to_string(s) +
                     " exceeds the accepted range 0..2 for --p " + std::to_string(p) +
                     "; pass --degree explicitly");
}

void cmd_run(const Options& o, CLI::App& sub, std::ostream& csv, std::ostream& err) {
  auto rc = resolve_case(o, sub);
  double h;
  if (given(sub, "--h")) {
    h = o.h;
    steps_for(rc.c.final_time, h, "--h");
  } else if (given(sub, "--N")) {
    h = rc.c.final_time / static_cast<double>(o.n_steps);
  } else {
    throw UsageError("--h/--N: exactly one is required (accepted: --h > 0 dividing T, or --N >= 1)");
  }
  check_correction(o, o.p);

  bench::ConvergenceStudy study;
  study.problem = rc.c;
  study.variant = bench::parse_variant(o.scheme);
  study.bdf_order = o.p;
  study.starting_correction = o.corrected;
  study.correction_degree = o.degree;
  study.correction_offset = o.offset;
  study.galerkin_points = o.quad_points;
  study.newton = newton_config(o);
  if (given(sub, "--N")) {
    // keep N exact even when T / N is not representable
    study.problem.final_time = h * static_cast<double>(o.n_steps);
  }
  const auto traj = bench::simulate(study, h);
  const auto energy = bench::energy_trace(traj, rc.c.model);

  const int d = rc.c.model.dim;
  std::ostringstream header;
  header << 't';
  for (int i = 0; i < d; ++i) header << ",x" << (d > 1 ? std::to_string(i + 1) : "");
  header << ",energy";
  if (rc.exact) {
    for (int i = 0; i < d; ++i) header << ",exact" << (d > 1 ? std::to_string(i + 1) : "");
    header << ",abs_error";
  }
  csv << header.str() << '\n';
  double worst = 0.0;
  for (std::size_t k = 0; k < traj.x.size(); ++k) {
    const double t = traj.time(k);
    csv << fmt(t);
    for (int i = 0; i < d; ++i) csv << ',' << fmt(traj.x[k][i]);
    csv << ',' << fmt(energy.values[k]);
    if (rc.exact) {
      const auto ex = rc.c.model.exact_solution(t);
      for (int i = 0; i < d; ++i) csv << ',' << fmt(ex[i]);
      const double e = (traj.x[k] - ex).cwiseAbs().maxCoeff();
      worst = std::max(worst, e);
      csv << ',' << fmt(e);
    }
    csv << '\n';
  }
  if (rc.exact) err << "max abs error: " << fmt(worst) << '\n';
  else err << "note: exact solution not available for the chosen parameters\n";
}

void cmd_convergence(const Options& o, CLI::App& sub, std::ostream& csv, std::ostream& err) {
  auto rc = resolve_case(o, sub);
  if (!rc.exact)
    throw UsageError("--model: '" + o.model + "' has no exact solution for these parameters");
  std::vector<double> steps = o.h_list.empty() ? rc.c.steps : o.h_list;
  if (steps.size() < 4)
    throw UsageError("--h: needs at least 4 step sizes (accepted: list of >= 4 reals > 0)");
  std::sort(steps.begin(), steps.end(), std::greater<>());
  if (std::adjacent_find(steps.begin(), steps.end()) != steps.end())
    throw UsageError("--h: step sizes must be distinct");
  for (double h : steps) steps_for(rc.c.final_time, h, "--h");
  if (o.p_list.empty()) throw UsageError("--p: needs at least one order (accepted: 1..6)");
  for (int p : o.p_list) check_correction(o, p);

  write_row(csv, {"p", "h", "error"});
  for (int p : o.p_list) {
    bench::ConvergenceStudy study;
    study.problem = rc.c;
    study.variant = bench::parse_variant(o.scheme);
    study.bdf_order = p;
    study.steps = steps;
    study.starting_correction = o.corrected;
    study.correction_degree = o.degree;
    study.correction_offset = o.offset;
    study.galerkin_points = o.quad_points;
  study.galerkin_points = o.quad_points;
  study.correction_offset = o.offset;
  study.galerkin_points = o.quad_points;
    study.tail = o.tail;
    study.newton = newton_config(o);
    const auto rep = bench::run_convergence(study);
    for (std::size_t i = 0; i < rep.steps.size(); ++i)
      write_row(csv, {fmt(p), fmt(rep.steps[i]), fmt(rep.errors[i])});
    err << "p=" << p << " order=" << fmt(rep.slope) << " r2=" << fmt(rep.r2) << " local=";
    for (std::size_t i = 0; i < rep.local_slopes.size(); ++i)
      err << (i ? "," : "") << fmt(rep.local_slopes[i]);
    err << '\n';
  }
}

}  // namespace

std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Fractional variational integrators with convolution quadrature", "fvi"};
  try {
    build(app, o);
    parse(app, args);
    if (!o.config.empty()) {
      auto extra = config_arguments(o.config, app);
      if (!extra.empty()) {
        Options fresh;
        o = fresh;
        std::vector<std::string> all = args;
        all.insert(all.end(), extra.begin(), extra.end());
        app.clear();
        parse(app, all);
      }
    }
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }

  CLI::App* sub = app.get_subcommands().front();
  std::ostringstream csv;
  try {
    const std::string name = sub->get_name();
    if (name == "weights") cmd_weights(o, csv);
    else if (name == "fracderiv") cmd_fracderiv(o, csv);
    else if (name == "run") cmd_run(o, *sub, csv, err);
    else cmd_convergence(o, *sub, csv, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const StepFailure& e) {
    err << "error: numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const NewtonFailure& e) {
    err << "error: numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const NumericalDegeneracyError& e) {
    err << "error: numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalFailure;
  }

  if (o.output.empty()) {
    out << csv.str();
  } else {
    std::ofstream file(o.output, std::ios::binary);
    if (!file) {
      err << "error: --output: cannot open '" << o.output << "' for writing\n";
      return kUsageError;
    }
    file << csv.str();
  }
  return kSuccess;
}

}  // namespace fvi::cli
