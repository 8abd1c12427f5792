#include "dhj/sl_solver.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "dhj/parallel.hpp"

namespace dhj {

double default_dt_dpp(const Problem& prob, double min_spacing, double safety) {
  const double v_max = solver_velocity_bound(prob, safety);
  double dt = 0.5 * min_spacing / v_max;
  if (prob.alpha * dt > 0.5) dt = 0.5 / prob.alpha;
  return dt;
}

namespace {

struct NodeMinimizer {
  const Problem& prob;
  const FieldInterpolator& interp;
  double dt;
  double discount;  // 1 - alpha*dt
  double v_max;

  // objective phi(v) = dt * L(x,v) + discount * u(x - dt v); the
  // interpolator wraps foot points periodically itself
  double objective(const Vec& x, double v_pot, const Vec& v) const {
    const double lag = 0.5 * v.dot(prob.metric.A_inv * v) - prob.drift.a.dot(v) - v_pot;
    return dt * lag + discount * interp.value(x - dt * v);
  }

  // tie-break: strictly better value, then smaller |v|^2, then lexicographic
  static bool better(double phi, const Vec& v, double best_phi, const Vec& best_v) {
    if (phi < best_phi) return true;
    if (phi > best_phi) return false;
    const double n = v.squaredNorm(), bn = best_v.squaredNorm();
    if (n < bn) return true;
    if (n > bn) return false;
    for (int d = 0; d < v.size(); ++d) {
      if (v[d] < best_v[d]) return true;
      if (v[d] > best_v[d]) return false;
    }
    return false;
  }

  double minimize(const Vec& x) const {
    const int dim = prob.dim();
    const double v_pot = prob.V(x);  // the Lagrangian's potential term is v-independent
    constexpr int kScan = 17;
    const double step = 2.0 * v_max / (kScan - 1);

    Vec best_v = Vec::Zero(dim);
    double best_phi = std::numeric_limits<double>::infinity();
    Vec v(dim);
    if (dim == 1) {
      for (int i = 0; i < kScan; ++i) {
        v[0] = -v_max + i * step;
        const double phi = objective(x, v_pot, v);
        if (better(phi, v, best_phi, best_v)) {
          best_phi = phi;
          best_v = v;
        }
      }
    } else {
      for (int i = 0; i < kScan; ++i) {
        v[0] = -v_max + i * step;
        for (int j = 0; j < kScan; ++j) {
          v[1] = -v_max + j * step;
          const double phi = objective(x, v_pot, v);
          if (better(phi, v, best_phi, best_v)) {
            best_phi = phi;
            best_v = v;
          }
        }
      }
    }

    // Newton polish on the smooth objective (quadratic Lagrangian + C^2
    // spline). Steps that leave the box are clamped; only improving steps
    // are kept.
    for (int it = 0; it < 3; ++it) {
      const Vec foot = x - dt * best_v;
      double uval;
      Vec ugrad(dim);
      Mat uhess(dim, dim);
      interp.eval(foot, &uval, &ugrad, &uhess);
      const Vec g = dt * (prob.metric.A_inv * best_v - prob.drift.a) - dt * discount * ugrad;
      const Mat H = dt * prob.metric.A_inv + dt * dt * discount * uhess;

      Vec cand = best_v;
      bool ok = false;
      if (dim == 1) {
        if (H(0, 0) > 1e-14) {
          cand[0] = best_v[0] - g[0] / H(0, 0);
          ok = true;
        }
      } else {
        const double det = H(0, 0) * H(1, 1) - H(0, 1) * H(1, 0);
        if (H(0, 0) > 1e-14 && det > 1e-20) {
          cand[0] = best_v[0] - (H(1, 1) * g[0] - H(0, 1) * g[1]) / det;
          cand[1] = best_v[1] - (H(0, 0) * g[1] - H(1, 0) * g[0]) / det;
          ok = true;
        }
      }
      if (!ok) break;
      for (int d = 0; d < dim; ++d) cand[d] = std::clamp(cand[d], -v_max, v_max);
      const double phi = objective(x, v_pot, cand);
      if (!(phi < best_phi)) break;
      best_phi = phi;
      best_v = cand;
    }
    return best_phi;
  }
};

}  // namespace

GridField dpp_apply(const Problem& prob, const GridField& u, double dt_dpp, double safety) {
  const double adt = prob.alpha * dt_dpp;
  if (!(adt > 0.0 && adt < 1.0)) {
    throw ConfigError("dpp_apply: alpha*dt_dpp must lie in (0,1)");
  }
  FieldInterpolator interp(u);
  NodeMinimizer mini{prob, interp, dt_dpp, 1.0 - adt, solver_velocity_bound(prob, safety)};

  GridField out = GridField::zeros(u.domain, u.nodes, u.interp);
  parallel_for(u.size(), [&](std::size_t idx) {
    out.values[idx] = mini.minimize(u.node_point(idx));
  });
  return out;
}

std::pair<GridField, SolveStats> solve_value_iteration(const Problem& prob,
                                                       std::array<int, 2> nodes,
                                                       const SlOptions& opts) {
  if (!(opts.tol > 0.0)) throw ConfigError("solve_value_iteration: tol must be positive");
  GridField u = GridField::zeros(prob.domain, nodes, opts.interp);

  const double dt = opts.dt_dpp > 0.0 ? opts.dt_dpp
                                      : default_dt_dpp(prob, u.min_spacing(), opts.safety);
  const double adt = prob.alpha * dt;
  if (!(adt > 0.0 && adt < 1.0)) {
    throw ConfigError("solve_value_iteration: alpha*dt_dpp must lie in (0,1)");
  }
  const int cap = opts.max_iterations > 0
                      ? opts.max_iterations
                      : 10 * static_cast<int>(std::ceil(std::log(1.0 / opts.tol) / adt));

  SolveStats stats;
  stats.dt_dpp = dt;
  for (int it = 1; it <= cap; ++it) {
    GridField next = dpp_apply(prob, u, dt, opts.safety);
    stats.iterations = it;
    stats.final_sup_change = sup_distance(next, u);
    u = std::move(next);
    if (stats.final_sup_change <= opts.tol) {
      stats.residual_inf = hj_residual(prob, u);
      return {std::move(u), stats};
    }
  }
  throw NumericalError("solve_value_iteration: no convergence within " + std::to_string(cap) +
                       " sweeps (sup-change " + std::to_string(stats.final_sup_change) + ")");
}

double hj_residual(const Problem& prob, const GridField& u, DiffKind kind) {
  const std::vector<GridField> grad = numerical_gradient(u, kind);
  double worst = 0.0;
  Vec du(u.dim());
  for (std::size_t idx = 0; idx < u.size(); ++idx) {
    const Vec x = u.node_point(idx);
    for (int d = 0; d < u.dim(); ++d) du[d] = grad[d].values[idx];
    const double r = std::abs(hamiltonian(prob, du, x) + prob.alpha * u.values[idx]);
    worst = std::max(worst, r);
  }
  return worst;
}

}  // namespace dhj
