#include "dhj/runner.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numbers>
#include <set>

#include <nlohmann/json.hpp>

#include "dhj/action_oracle.hpp"
#include "dhj/grid_field.hpp"
#include "dhj/io.hpp"
#include "dhj/pde_evolver.hpp"
#include "dhj/phase_flow.hpp"
#include "dhj/sl_solver.hpp"

namespace dhj {

using nlohmann::json;

namespace {

const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw ConfigError(where + ": missing field \"" + key + "\"");
  return obj.at(key);
}

double require_number(const json& obj, const char* key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_number()) throw ConfigError(where + ": field \"" + key + "\" must be a number");
  return v.get<double>();
}

}  // namespace

Problem problem_from_json_text(const std::string& text, const std::string& source) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(source + ": JSON parse error: " + e.what());
  }
  if (!root.is_object()) throw ConfigError(source + ": top level must be an object");

  const json& jdim = require(root, "dim", source);
  if (!jdim.is_number_integer()) throw ConfigError(source + ": \"dim\" must be an integer");
  const int dim = jdim.get<int>();
  if (dim != 1 && dim != 2) throw ConfigError(source + ": \"dim\" must be 1 or 2");

  TorusDomain domain;
  domain.dim = dim;
  const json& jper = require(root, "periods", source);
  if (!jper.is_array() || static_cast<int>(jper.size()) != dim) {
    throw ConfigError(source + ": \"periods\" must be an array of dim numbers");
  }
  domain.periods.resize(dim);
  for (int d = 0; d < dim; ++d) {
    if (!jper[d].is_number()) throw ConfigError(source + ": \"periods\" entries must be numbers");
    domain.periods[d] = jper[d].get<double>();
  }

  const json& jpot = require(root, "potential", source);
  if (!jpot.is_object()) throw ConfigError(source + ": \"potential\" must be an object");
  const json& jtype = require(jpot, "type", source + ".potential");
  if (!jtype.is_string() || jtype.get<std::string>() != "fourier") {
    throw ConfigError(source + ": potential.type must be \"fourier\"");
  }
  const json& jmodes = require(jpot, "modes", source + ".potential");
  if (!jmodes.is_array()) throw ConfigError(source + ": potential.modes must be an array");
  FourierPotential pot;
  for (std::size_t m = 0; m < jmodes.size(); ++m) {
    const std::string where = source + ".potential.modes[" + std::to_string(m) + "]";
    const json& jm = jmodes[m];
    if (!jm.is_object()) throw ConfigError(where + ": must be an object");
    const json& jk = require(jm, "k", where);
    if (!jk.is_array() || static_cast<int>(jk.size()) != dim) {
      throw ConfigError(where + ": \"k\" must be an array of dim integers");
    }
    FourierMode mode;
    mode.k.resize(dim);
    for (int d = 0; d < dim; ++d) {
      if (!jk[d].is_number_integer()) throw ConfigError(where + ": \"k\" entries must be integers");
      mode.k[d] = jk[d].get<int>();
    }
    const double re = require_number(jm, "re", where);
    const double im = jm.contains("im") ? require_number(jm, "im", where) : 0.0;
    mode.coeff = {re, im};
    pot.modes.push_back(mode);
  }

  const json& jmet = require(root, "metric", source);
  if (!jmet.is_array() || static_cast<int>(jmet.size()) != dim) {
    throw ConfigError(source + ": \"metric\" must be a dim x dim array of rows");
  }
  Mat A(dim, dim);
  for (int i = 0; i < dim; ++i) {
    if (!jmet[i].is_array() || static_cast<int>(jmet[i].size()) != dim) {
      throw ConfigError(source + ": \"metric\" rows must have dim entries");
    }
    for (int j = 0; j < dim; ++j) {
      if (!jmet[i][j].is_number()) throw ConfigError(source + ": \"metric\" entries must be numbers");
      A(i, j) = jmet[i][j].get<double>();
    }
  }

  const json& jdrift = require(root, "drift", source);
  if (!jdrift.is_array() || static_cast<int>(jdrift.size()) != dim) {
    throw ConfigError(source + ": \"drift\" must be an array of dim numbers");
  }
  DriftForm drift;
  drift.a.resize(dim);
  for (int d = 0; d < dim; ++d) {
    if (!jdrift[d].is_number()) throw ConfigError(source + ": \"drift\" entries must be numbers");
    drift.a[d] = jdrift[d].get<double>();
  }

  const double alpha = require_number(root, "alpha", source);

  try {
    Metric metric = Metric::make(A);
    return Problem::make(domain, pot, metric, drift, alpha);
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
}

Problem load_problem(const std::string& path) {
  return problem_from_json_text(read_text_file(path), path);
}

std::string problem_to_json(const Problem& prob) {
  JsonWriter w;
  w.begin_object();
  w.key("dim").value(prob.dim());
  w.key("periods").value(prob.domain.periods);
  w.key("potential").begin_object();
  w.key("type").value("fourier");
  w.key("modes").begin_array();
  for (const auto& mode : prob.potential.modes) {
    w.begin_object();
    w.key("k").begin_array();
    for (int d = 0; d < prob.dim(); ++d) w.value(mode.k[d]);
    w.end_array();
    w.key("re").value(mode.coeff.real());
    w.key("im").value(mode.coeff.imag());
    w.end_object();
  }
  w.end_array();
  w.end_object();
  w.key("metric").begin_array();
  for (int i = 0; i < prob.dim(); ++i) {
    w.begin_array();
    for (int j = 0; j < prob.dim(); ++j) w.value(prob.metric.A(i, j));
    w.end_array();
  }
  w.end_array();
  w.key("drift").value(prob.drift.a);
  w.key("alpha").value(prob.alpha);
  w.end_object();
  return w.str();
}

RunSpec load_config(const std::string& path) {
  RunSpec spec;
  spec.problem = load_problem(path);
  return spec;
}

std::string regime_report_json(const RegimeReport& rep) {
  JsonWriter w;
  w.begin_object();
  w.key("r").value(rep.r);
  w.key("regime").value(regime_name(rep.regime));
  w.key("s");
  if (rep.s) {
    w.value(*rep.s);
  } else {
    w.null();
  }
  w.key("k_cap");
  if (rep.k_cap) {
    w.value(*rep.k_cap);
  } else {
    w.value("Unbounded");
  }
  w.key("exponents").begin_array();
  for (const auto& mu : rep.exponents) {
    w.begin_array().value(mu.real()).value(mu.imag()).end_array();
  }
  w.end_array();
  w.key("argmax_q").value(rep.argmax_q);
  if (rep.regime == Regime::Unsupported) w.key("deficit").value(rep.deficit);
  if (!rep.note.empty()) w.key("note").value(rep.note);
  w.end_object();
  return w.str();
}

int run_analyze(const RunSpec& spec) {
  const RegimeReport rep = analyze_problem(spec.problem, spec.scan_per_axis);
  const std::string out = regime_report_json(rep);
  if (!spec.out_path.empty()) write_text_file(spec.out_path, out + "\n");
  std::cout << "analyze: regime=" << regime_name(rep.regime) << " r=" << format_double(rep.r);
  if (rep.k_cap) {
    std::cout << " k_cap=" << *rep.k_cap;
  } else {
    std::cout << " k_cap=Unbounded";
  }
  if (!spec.out_path.empty()) std::cout << " -> " << spec.out_path;
  std::cout << "\n";
  return 0;
}

namespace {

std::pair<GridField, SolveStats> solve_by_method(const Problem& prob, const std::string& method,
                                                 std::array<int, 2> grid, double tol) {
  if (method == "sl") {
    SlOptions opts;
    opts.tol = tol;
    return solve_value_iteration(prob, grid, opts);
  }
  if (method == "lf") {
    return solve_lf_steady(prob, grid, std::min(tol, 1e-10));
  }
  throw ConfigError("method must be \"sl\" or \"lf\", got \"" + method + "\"");
}

std::string stats_json(const RunSpec& spec, const SolveStats& stats) {
  JsonWriter w;
  w.begin_object();
  w.key("method").value(spec.method);
  w.key("grid").begin_array();
  for (int d = 0; d < spec.problem.dim(); ++d) w.value(spec.grid[d]);
  w.end_array();
  w.key("tol").value(spec.tol);
  w.key("iterations").value(stats.iterations);
  w.key("final_sup_change").value(stats.final_sup_change);
  w.key("residual_inf").value(stats.residual_inf);
  w.key("dt_dpp").value(stats.dt_dpp);
  w.end_object();
  return w.str();
}

}  // namespace

int run_solve(const RunSpec& spec) {
  auto [u, stats] = solve_by_method(spec.problem, spec.method, spec.grid, spec.tol);
  if (!spec.out_path.empty()) write_field_csv(spec.out_path, u);
  if (!spec.stats_path.empty()) write_text_file(spec.stats_path, stats_json(spec, stats) + "\n");
  std::cout << "solve: method=" << spec.method << " iterations=" << stats.iterations
            << " residual_inf=" << format_double(stats.residual_inf);
  if (!spec.out_path.empty()) std::cout << " -> " << spec.out_path;
  std::cout << "\n";
  return 0;
}

namespace {

struct CheckOutcome {
  bool ran = false;
  bool pass = true;
};

void verify_residual(const RunSpec& spec, const GridField& u, JsonWriter& w, CheckOutcome& oc) {
  const double r = hj_residual(spec.problem, u);
  oc.ran = true;
  oc.pass = r <= spec.residual_tol;
  w.key("residual").begin_object();
  w.key("value").value(r);
  w.key("threshold").value(spec.residual_tol);
  w.key("pass").value(oc.pass);
  w.end_object();
}

void verify_oracle(const RunSpec& spec, const GridField& u, JsonWriter& w, CheckOutcome& oc) {
  const Problem& prob = spec.problem;
  FieldInterpolator interp(u);
  OracleConfig cfg;
  cfg.T = spec.oracle_T > 0.0 ? spec.oracle_T : 4.0 / prob.alpha;
  cfg.segments = spec.oracle_segments;
  cfg.restarts = spec.oracle_restarts;
  cfg.seed = spec.seed;

  // sample points: fractions of the cell along each axis (the diagonal in 2-D)
  const std::vector<double> fractions = {0.0, 0.25, 0.5};
  double max_gap = 0.0;
  oc.ran = true;
  w.key("oracle").begin_object();
  w.key("convention").value("Canonical");
  w.key("points").begin_array();
  for (double f : fractions) {
    Vec q(prob.dim());
    for (int d = 0; d < prob.dim(); ++d) q[d] = f * prob.domain.periods[d];
    const OracleResult res = minimize_action(prob, q, cfg);
    const double u_sl = interp.value(q);
    const double gap = std::abs(u_sl - res.u_estimate);
    max_gap = std::max(max_gap, gap);
    w.begin_object();
    w.key("q").value(q);
    w.key("u_sl").value(u_sl);
    w.key("u_oracle").value(res.u_estimate);
    w.key("gap").value(gap);
    w.key("tail_bound").value(res.tail);
    w.key("convention").value("Canonical");
    if (res.velocity_bound_hit) w.key("velocity_bound_hit").value(true);
    w.end_object();
  }
  w.end_array();
  oc.pass = max_gap <= spec.oracle_tol;
  w.key("max_gap").value(max_gap);
  w.key("threshold").value(spec.oracle_tol);
  w.key("pass").value(oc.pass);
  w.end_object();
}

void verify_invariance(const RunSpec& spec, const GridField& u, JsonWriter& w, CheckOutcome& oc) {
  const Problem& prob = spec.problem;
  GraphSampler sampler(prob, u);
  double worst = 0.0;
  for (int s = 0; s < spec.invariance_starts; ++s) {
    Vec q0(prob.dim());
    for (int d = 0; d < prob.dim(); ++d) {
      q0[d] = (static_cast<double>(s) / spec.invariance_starts) * prob.domain.periods[d];
    }
    const PhaseState z0 = make_state(prob.domain, q0, sampler.du(wrap_point(prob.domain, q0)));
    const Trajectory traj = rk4_integrate(prob, z0, spec.invariance_dt, spec.invariance_T);
    for (const TrajectoryPoint& pt : traj) {
      worst = std::max(worst, sampler.deviation(pt.z));
    }
  }
  const double threshold = spec.invariance_factor * u.min_spacing();
  oc.ran = true;
  oc.pass = worst <= threshold;
  w.key("invariance").begin_object();
  w.key("starts").value(spec.invariance_starts);
  w.key("T").value(spec.invariance_T);
  w.key("dt").value(spec.invariance_dt);
  w.key("max_deviation").value(worst);
  w.key("threshold").value(threshold);
  w.key("gradient_consistency").value(sampler.gradient_consistency());
  w.key("pass").value(oc.pass);
  w.end_object();
}

void verify_bh(const RunSpec& spec, const GridField& u, JsonWriter& w, CheckOutcome& oc) {
  const Problem& prob = spec.problem;
  const std::vector<GridField> grad = numerical_gradient(u);
  double min_margin = std::numeric_limits<double>::infinity();
  Vec du(prob.dim());
  for (std::size_t idx = 0; idx < u.size(); ++idx) {
    for (int d = 0; d < prob.dim(); ++d) du[d] = grad[d].values[idx];
    const PhaseState z = make_state(prob.domain, u.node_point(idx), du);
    min_margin = std::min(min_margin, b_h_margin(prob, z));
  }
  const double threshold = -spec.bh_factor * u.min_spacing();
  oc.ran = true;
  oc.pass = min_margin >= threshold;
  w.key("bh").begin_object();
  w.key("min_margin").value(min_margin);
  w.key("threshold").value(threshold);
  w.key("pass").value(oc.pass);
  w.end_object();
}

void verify_continuity(const RunSpec& spec, const GridField& u, JsonWriter& w, CheckOutcome& oc) {
  const Problem& base = spec.problem;
  // scale alpha and every mode amplitude by 1.01, re-solve on the same grid
  FourierPotential scaled = base.potential;
  for (auto& mode : scaled.modes) mode.coeff *= 1.01;
  const Problem perturbed =
      Problem::make(base.domain, scaled, base.metric, base.drift, base.alpha * 1.01);
  const GridField u2 =
      solve_by_method(perturbed, spec.method, {u.nodes[0], u.nodes[1]}, spec.tol).first;
  const double delta = sup_distance(u2, u);
  const double threshold = spec.continuity_factor * std::max(u.sup_norm(), 1e-3);
  oc.ran = true;
  oc.pass = delta <= threshold;
  w.key("continuity").begin_object();
  w.key("scale").value(1.01);
  w.key("delta_u").value(delta);
  w.key("threshold").value(threshold);
  w.key("pass").value(oc.pass);
  w.end_object();
}

}  // namespace

int run_verify(const RunSpec& spec) {
  static const std::set<std::string> known = {"residual", "oracle", "invariance", "bh",
                                              "continuity"};
  std::vector<std::string> checks = spec.checks;
  if (checks.empty()) checks = {"residual", "oracle", "invariance", "bh", "continuity"};
  for (const std::string& c : checks) {
    if (!known.count(c)) throw ConfigError("unknown check \"" + c + "\"");
  }

  const GridField u = read_field_csv(spec.field_path, spec.problem.domain);

  JsonWriter w;
  w.begin_object();
  w.key("checks").begin_object();
  std::vector<std::string> failed;
  for (const std::string& c : checks) {
    CheckOutcome oc;
    if (c == "residual") verify_residual(spec, u, w, oc);
    if (c == "oracle") verify_oracle(spec, u, w, oc);
    if (c == "invariance") verify_invariance(spec, u, w, oc);
    if (c == "bh") verify_bh(spec, u, w, oc);
    if (c == "continuity") verify_continuity(spec, u, w, oc);
    if (oc.ran && !oc.pass) failed.push_back(c);
  }
  w.end_object();
  w.key("failed").begin_array();
  for (const std::string& c : failed) w.value(c);
  w.end_array();
  w.key("pass").value(failed.empty());
  w.end_object();

  if (!spec.out_path.empty()) write_text_file(spec.out_path, w.str() + "\n");
  if (failed.empty()) {
    std::cout << "verify: all checks passed";
  } else {
    std::cout << "verify: FAILED checks:";
    for (const std::string& c : failed) std::cout << ' ' << c;
  }
  if (!spec.out_path.empty()) std::cout << " -> " << spec.out_path;
  std::cout << "\n";
  return failed.empty() ? 0 : 3;
}

namespace {

struct Perturbation {
  std::string kind;
  double amplitude = 0.0;
  int mode = 1;
};

Perturbation parse_perturb(const std::string& text) {
  Perturbation p;
  const auto c1 = text.find(':');
  if (c1 == std::string::npos) throw ConfigError("perturb must look like const:AMP or sine:AMP:MODE");
  p.kind = text.substr(0, c1);
  std::string rest = text.substr(c1 + 1);
  const auto c2 = rest.find(':');
  try {
    if (c2 == std::string::npos) {
      p.amplitude = std::stod(rest);
    } else {
      p.amplitude = std::stod(rest.substr(0, c2));
      p.mode = std::stoi(rest.substr(c2 + 1));
    }
  } catch (const std::exception&) {
    throw ConfigError("perturb: cannot parse \"" + text + "\"");
  }
  if (p.kind != "const" && p.kind != "sine") {
    throw ConfigError("perturb kind must be const or sine, got \"" + p.kind + "\"");
  }
  if (p.kind == "sine" && p.mode < 1) throw ConfigError("perturb: sine mode must be >= 1");
  return p;
}

}  // namespace

int run_evolve(const RunSpec& spec) {
  const Problem& prob = spec.problem;
  const GridField u_ref = read_field_csv(spec.field_path, prob.domain);
  const Perturbation pert = parse_perturb(spec.perturb);
  if (!(spec.evolve_T > 0.0)) throw ConfigError("evolve: T must be positive");

  GridField v0 = u_ref;
  for (std::size_t idx = 0; idx < v0.size(); ++idx) {
    if (pert.kind == "const") {
      v0.values[idx] += pert.amplitude;
    } else {
      const Vec q = v0.node_point(idx);
      double bump = 0.0;
      for (int d = 0; d < prob.dim(); ++d) {
        bump += std::sin(2.0 * std::numbers::pi * pert.mode * q[d] / prob.domain.periods[d]);
      }
      v0.values[idx] += pert.amplitude * bump;
    }
  }

  const double sample_every =
      spec.sample_every > 0.0 ? spec.sample_every : spec.evolve_T / 200.0;
  LfOptions opts;
  opts.dt = spec.evolve_dt;
  const ConvergenceTrace trace = evolve_cauchy(prob, v0, u_ref, spec.evolve_T, sample_every, opts);

  const double t0 = spec.fit_t0 >= 0.0 ? spec.fit_t0 : 0.1 * spec.evolve_T;
  const double t1 = spec.fit_t1 >= 0.0 ? spec.fit_t1 : 0.9 * spec.evolve_T;

  JsonWriter w;
  w.begin_object();
  w.key("perturb").value(spec.perturb);
  w.key("T").value(spec.evolve_T);
  w.key("sample_every").value(sample_every);
  w.key("fit_window").begin_array().value(t0).value(t1).end_array();
  w.key("alpha").value(prob.alpha);
  double value_rate = 0.0;
  bool have_value_rate = true;
  try {
    value_rate = fit_decay_rate(trace, TraceChannel::Value, t0, t1);
  } catch (const NumericalError&) {
    have_value_rate = false;
  }
  w.key("value_rate");
  if (have_value_rate) {
    w.value(value_rate);
  } else {
    w.null();
  }
  double grad_rate = 0.0;
  bool have_grad_rate = true;
  try {
    grad_rate = fit_decay_rate(trace, TraceChannel::Grad, t0, t1);
  } catch (const NumericalError&) {
    have_grad_rate = false;
  }
  w.key("grad_rate");
  if (have_grad_rate) {
    w.value(grad_rate);
  } else {
    w.null();
  }
  w.end_object();

  if (!spec.out_path.empty()) write_trace_csv(spec.out_path, trace);
  if (!spec.rate_path.empty()) write_text_file(spec.rate_path, w.str() + "\n");
  std::cout << "evolve: perturb=" << spec.perturb;
  if (have_value_rate) std::cout << " value_rate=" << format_double(value_rate);
  if (have_grad_rate) std::cout << " grad_rate=" << format_double(grad_rate);
  if (!spec.out_path.empty()) std::cout << " -> " << spec.out_path;
  std::cout << "\n";
  return 0;
}

}  // namespace dhj
