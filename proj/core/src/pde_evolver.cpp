#include "dhj/pde_evolver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>

#include "dhj/parallel.hpp"

namespace dhj {

Vec lf_sigma(const Problem& prob, const GridField& u, double slope_margin) {
  const int dim = prob.dim();
  const std::vector<GridField> grad = numerical_gradient(u);
  Vec lo(dim), hi(dim);
  for (int d = 0; d < dim; ++d) {
    const auto [mn, mx] = std::minmax_element(grad[d].values.begin(), grad[d].values.end());
    lo[d] = *mn - slope_margin;
    hi[d] = *mx + slope_margin;
  }
  // dH/dp = A (p + a) is linear, so its per-axis extrema over the box sit
  // at corners.
  Vec sigma = Vec::Zero(dim);
  const int corners = 1 << dim;
  Vec p(dim);
  for (int c = 0; c < corners; ++c) {
    for (int d = 0; d < dim; ++d) p[d] = (c >> d) & 1 ? hi[d] : lo[d];
    const Vec dHdp = prob.metric.A * (p + prob.drift.a);
    for (int d = 0; d < dim; ++d) sigma[d] = std::max(sigma[d], std::abs(dHdp[d]));
  }
  return sigma;
}

double lf_hamiltonian(const Problem& prob, const Vec& x, const Vec& p_minus,
                      const Vec& p_plus, const Vec& sigma) {
  const Vec p_mid = 0.5 * (p_minus + p_plus);
  double h = hamiltonian(prob, p_mid, x);
  for (int d = 0; d < prob.dim(); ++d) {
    h -= 0.5 * sigma[d] * (p_plus[d] - p_minus[d]);
  }
  return h;
}

namespace {

double cfl_dt(const Problem& prob, const GridField& u, const Vec& sigma, double cfl) {
  double rate = prob.alpha;
  for (int d = 0; d < u.dim(); ++d) rate += sigma[d] / u.spacing(d);
  return cfl / rate;
}

void check_cfl(const Problem& prob, const GridField& u, double dt, const Vec& sigma) {
  double rate = prob.alpha;
  for (int d = 0; d < u.dim(); ++d) rate += sigma[d] / u.spacing(d);
  if (dt * rate > 0.9 * (1.0 + 1e-12)) {
    throw ConfigError("step_explicit: CFL violated, dt*(sum sigma_i/h_i + alpha) = " +
                      std::to_string(dt * rate) + " > 0.9");
  }
}

inline int wrap_index(int i, int n) {
  i %= n;
  return i < 0 ? i + n : i;
}

}  // namespace

GridField step_explicit(const Problem& prob, const GridField& u, double dt, const Vec& sigma) {
  check_cfl(prob, u, dt, sigma);
  const int dim = u.dim();
  const int n0 = u.nodes[0], n1 = u.nodes[1];
  GridField out = GridField::zeros(u.domain, u.nodes, u.interp);

  std::atomic<bool> bad{false};
  parallel_for(u.size(), [&](std::size_t idx) {
    const int i = static_cast<int>(idx) / n1;
    const int j = static_cast<int>(idx) % n1;
    Vec pm(dim), pp(dim);
    const double here = u.values[idx];
    {
      const double h = u.spacing(0);
      pm[0] = (here - u.at(wrap_index(i - 1, n0), j)) / h;
      pp[0] = (u.at(wrap_index(i + 1, n0), j) - here) / h;
    }
    if (dim == 2) {
      const double h = u.spacing(1);
      pm[1] = (here - u.at(i, wrap_index(j - 1, n1))) / h;
      pp[1] = (u.at(i, wrap_index(j + 1, n1)) - here) / h;
    }
    const Vec x = u.node_point(idx);
    const double next = here - dt * (lf_hamiltonian(prob, x, pm, pp, sigma) + prob.alpha * here);
    if (!std::isfinite(next)) bad = true;
    out.values[idx] = next;
  });
  if (bad) throw NumericalError("step_explicit: non-finite value after step");
  return out;
}

GridField step_explicit(const Problem& prob, const GridField& u, double dt) {
  return step_explicit(prob, u, dt, lf_sigma(prob, u));
}

std::pair<GridField, SolveStats> solve_lf_steady(const Problem& prob, std::array<int, 2> nodes,
                                                 double tol, const LfOptions& opts) {
  if (!(tol > 0.0)) throw ConfigError("solve_lf_steady: tol must be positive");
  GridField u = GridField::zeros(prob.domain, nodes);
  const Vec sigma = lf_sigma(prob, u, opts.slope_margin);
  const double dt = opts.dt > 0.0 ? opts.dt : cfl_dt(prob, u, sigma, opts.cfl);

  SolveStats stats;
  stats.dt_dpp = dt;
  const double adt = prob.alpha * dt;
  const int cap = 50 * static_cast<int>(std::ceil(std::log(1.0 / tol) / adt)) + 100;
  for (int it = 1; it <= cap; ++it) {
    GridField next = step_explicit(prob, u, dt, sigma);
    stats.iterations = it;
    stats.final_sup_change = sup_distance(next, u);
    u = std::move(next);
    if (stats.final_sup_change <= tol) {
      stats.residual_inf = hj_residual(prob, u);
      return {std::move(u), stats};
    }
  }
  throw NumericalError("solve_lf_steady: no convergence within " + std::to_string(cap) +
                       " steps (sup-change " + std::to_string(stats.final_sup_change) + ")");
}

namespace {

double grad_sup_mismatch(const GridField& a, const GridField& b) {
  const auto ga = numerical_gradient(a);
  const auto gb = numerical_gradient(b);
  double worst = 0.0;
  for (std::size_t d = 0; d < ga.size(); ++d) {
    worst = std::max(worst, sup_distance(ga[d], gb[d]));
  }
  return worst;
}

}  // namespace

ConvergenceTrace evolve_cauchy(const Problem& prob, const GridField& v0, const GridField& u_ref,
                               double T, double sample_every, const LfOptions& opts) {
  if (v0.nodes != u_ref.nodes || v0.dim() != u_ref.dim()) {
    throw ConfigError("evolve_cauchy: v0 and u_ref grids must match");
  }
  if (!(T > 0.0) || !(sample_every > 0.0)) {
    throw ConfigError("evolve_cauchy: T and sample_every must be positive");
  }

  const Vec sigma = lf_sigma(prob, v0, opts.slope_margin);
  double dt = opts.dt > 0.0 ? opts.dt : cfl_dt(prob, v0, sigma, opts.cfl);
  const long n_steps = static_cast<long>(std::ceil(T / dt - 1e-12));
  dt = T / static_cast<double>(n_steps);  // land exactly on T
  const long stride = std::max<long>(1, std::lround(sample_every / dt));

  ConvergenceTrace trace;
  auto record = [&](double t, const GridField& v) {
    trace.times.push_back(t);
    trace.value_error.push_back(sup_distance(v, u_ref));
    trace.grad_error.push_back(grad_sup_mismatch(v, u_ref));
  };

  GridField v = v0;
  record(0.0, v);
  for (long k = 1; k <= n_steps; ++k) {
    try {
      v = step_explicit(prob, v, dt, sigma);
    } catch (const NumericalError& e) {
      throw NumericalError(std::string(e.what()) + " at t = " + std::to_string(k * dt));
    }
    if (k % stride == 0 || k == n_steps) record(k * dt, v);
  }
  return trace;
}

double fit_decay_rate(const ConvergenceTrace& trace, TraceChannel channel, double t0, double t1) {
  const std::vector<double>& err =
      channel == TraceChannel::Value ? trace.value_error : trace.grad_error;
  std::vector<double> ts, logs;
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    const double t = trace.times[i];
    if (t < t0 || t > t1) continue;
    if (!(err[i] > 1e-13)) continue;  // below noise floor
    ts.push_back(t);
    logs.push_back(std::log(err[i]));
  }
  if (ts.size() < 5) {
    throw NumericalError("fit_decay_rate: degenerate fit, fewer than 5 usable samples in window");
  }
  double mt = 0.0, ml = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    mt += ts[i];
    ml += logs[i];
  }
  mt /= ts.size();
  ml /= ts.size();
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    num += (ts[i] - mt) * (logs[i] - ml);
    den += (ts[i] - mt) * (ts[i] - mt);
  }
  if (den == 0.0) throw NumericalError("fit_decay_rate: degenerate fit, zero time spread");
  return -num / den;
}

}  // namespace dhj
