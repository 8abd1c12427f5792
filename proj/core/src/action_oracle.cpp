#include "dhj/action_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dhj/parallel.hpp"
#include "dhj/rng.hpp"

namespace dhj {

namespace {

void check_curve(const Curve& curve) {
  if (curve.nodes.size() < 2 || !(curve.dt > 0.0)) {
    throw ConfigError("curve needs dt > 0 and at least two nodes");
  }
  for (const Vec& x : curve.nodes) {
    if (!all_finite(x)) throw NumericalError("curve contains a non-finite node");
  }
}

// exact per-segment discount weights: integral of exp(-alpha t) over segment j
inline double segment_weight(double alpha, double dt, int j) {
  return std::exp(-alpha * dt * j) * (1.0 - std::exp(-alpha * dt)) / alpha;
}

inline double drift_sign(Convention c) {
  return c == Convention::Canonical ? -1.0 : 1.0;
}

}  // namespace

double action_value(const Problem& prob, const Curve& curve, Convention convention) {
  check_curve(curve);
  const double sgn = drift_sign(convention);
  const double dt = curve.dt;
  const int segments = static_cast<int>(curve.nodes.size()) - 1;
  double total = 0.0;
  for (int j = 0; j < segments; ++j) {
    const Vec v = (curve.nodes[j + 1] - curve.nodes[j]) / dt;
    const Vec mid = 0.5 * (curve.nodes[j] + curve.nodes[j + 1]);
    const double integrand = 0.5 * v.dot(prob.metric.A_inv * v) + sgn * prob.drift.a.dot(v) -
                             prob.V(wrap_point(prob.domain, mid));
    total += segment_weight(prob.alpha, dt, j) * integrand;
  }
  return total;
}

std::vector<Vec> action_gradient(const Problem& prob, const Curve& curve, Convention convention) {
  check_curve(curve);
  const int segments = static_cast<int>(curve.nodes.size()) - 1;
  if (segments < 2) throw ConfigError("action_gradient needs at least 2 segments");
  const double sgn = drift_sign(convention);
  const double dt = curve.dt;

  std::vector<Vec> grad(segments, Vec::Zero(prob.dim()));
  for (int j = 0; j < segments; ++j) {
    const double w = segment_weight(prob.alpha, dt, j);
    const Vec v = (curve.nodes[j + 1] - curve.nodes[j]) / dt;
    const Vec mid = 0.5 * (curve.nodes[j] + curve.nodes[j + 1]);
    const Vec dIdv = prob.metric.A_inv * v + sgn * prob.drift.a;
    const Vec dIdm = -prob.dV(wrap_point(prob.domain, mid));
    // node j+1 ends segment j; node j starts it
    grad[j] += w * (dIdv / dt + 0.5 * dIdm);
    if (j >= 1) grad[j - 1] += w * (-dIdv / dt + 0.5 * dIdm);
  }
  return grad;  // grad[k-1] corresponds to node k, k = 1..segments
}

double tail_bound(const Problem& prob, double T) {
  if (T < 0.0) throw ConfigError("tail_bound: T must be nonnegative");
  const double v_b = velocity_bound(prob, 1.0);
  Eigen::SelfAdjointEigenSolver<Mat> eig(prob.metric.A_inv);
  const double kinetic = 0.5 * eig.eigenvalues().maxCoeff() * v_b * v_b;
  const double m_l = kinetic + std::max(std::abs(prob.pot_max), std::abs(prob.pot_min)) +
                     prob.drift.a.norm() * v_b;
  return std::exp(-prob.alpha * T) * m_l / prob.alpha;
}

namespace {

struct RestartOutcome {
  bool line_search_failed = true;  // no step was ever accepted
  double value = std::numeric_limits<double>::infinity();
  Curve curve;
  int accepted = 0;
  std::vector<double> accepted_values;
};

RestartOutcome descend(const Problem& prob, Curve curve, const OracleConfig& cfg) {
  const int segments = static_cast<int>(curve.nodes.size()) - 1;

  RestartOutcome out;
  double value = action_value(prob, curve, cfg.convention);
  out.value = value;
  out.curve = curve;
  out.line_search_failed = false;  // flipped back below if the first step dies

  std::vector<Vec> grad = action_gradient(prob, curve, cfg.convention);
  auto grad_inf = [&](const std::vector<Vec>& g) {
    double m = 0.0;
    for (const Vec& v : g) m = std::max(m, v.cwiseAbs().maxCoeff());
    return m;
  };

  std::vector<Vec> prev_nodes;
  std::vector<Vec> prev_grad;
  double step = 0.0;
  bool first = true;

  for (int it = 0; it < cfg.max_iterations; ++it) {
    const double gnorm = grad_inf(grad);
    if (gnorm <= cfg.grad_tol * std::max(1.0, std::abs(value))) break;

    if (first) {
      step = 0.01 / std::max(gnorm, 1e-12);
    } else {
      // BB step from the last accepted move
      double sy = 0.0, yy = 0.0;
      for (int k = 1; k <= segments; ++k) {
        const Vec s = curve.nodes[k] - prev_nodes[k];
        const Vec y = grad[k - 1] - prev_grad[k - 1];
        sy += s.dot(y);
        yy += y.dot(y);
      }
      step = yy > 0.0 && sy > 0.0 ? sy / yy : step;
      step = std::clamp(step, 1e-12, 1e3);
    }

    // backtracking: accepted steps never increase the objective
    bool accepted = false;
    Curve trial = curve;
    for (int bt = 0; bt < 40; ++bt) {
      for (int k = 1; k <= segments; ++k) {
        trial.nodes[k] = curve.nodes[k] - step * grad[k - 1];
      }
      const double trial_value = action_value(prob, trial, cfg.convention);
      if (trial_value < value) {
        prev_nodes = curve.nodes;
        prev_grad = grad;
        curve.nodes = trial.nodes;
        value = trial_value;
        grad = action_gradient(prob, curve, cfg.convention);
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (first) out.line_search_failed = true;
      break;
    }
    first = false;
    out.accepted += 1;
    out.accepted_values.push_back(value);
  }

  out.value = value;
  out.curve = std::move(curve);
  return out;
}

Curve make_start(const Problem& prob, const Vec& q0, const OracleConfig& cfg, int restart,
                 double v_box) {
  Curve c;
  c.q0 = wrap_point(prob.domain, q0);
  c.dt = cfg.T / cfg.segments;
  c.nodes.resize(cfg.segments + 1);
  Vec v = Vec::Zero(prob.dim());
  if (restart > 0) {
    SplitMix64 rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(restart)));
    for (int d = 0; d < prob.dim(); ++d) v[d] = rng.uniform(-v_box, v_box);
  }
  for (int j = 0; j <= cfg.segments; ++j) {
    c.nodes[j] = c.q0 + (j * c.dt) * v;
  }
  return c;
}

}  // namespace

OracleResult minimize_action(const Problem& prob, const Vec& q0, const OracleConfig& cfg) {
  if (!(cfg.T > 0.0)) throw ConfigError("minimize_action: T must be positive");
  if (cfg.segments < 8) throw ConfigError("minimize_action: need at least 8 segments");
  if (cfg.restarts < 1) throw ConfigError("minimize_action: need at least 1 restart");

  const double v_box = solver_velocity_bound(prob, 1.0);
  std::vector<RestartOutcome> outcomes(cfg.restarts);
  parallel_for(static_cast<std::size_t>(cfg.restarts), [&](std::size_t r) {
    Curve start = make_start(prob, q0, cfg, static_cast<int>(r), v_box);
    outcomes[r] = descend(prob, std::move(start), cfg);
  });

  int best = -1;
  bool all_failed = true;
  for (int r = 0; r < cfg.restarts; ++r) {
    if (!outcomes[r].line_search_failed) all_failed = false;
    if (best < 0 || outcomes[r].value < outcomes[best].value) best = r;
  }
  if (all_failed) {
    throw NumericalError("minimize_action: line search failed on every restart");
  }

  RestartOutcome& win = outcomes[best];
  OracleResult result;
  result.best_value = win.value;
  result.u_estimate = cfg.convention == Convention::Canonical ? win.value : -win.value;
  result.curve = std::move(win.curve);
  result.tail = tail_bound(prob, cfg.T);
  result.best_restart = best;
  result.iterations = win.accepted;
  result.accepted_values = std::move(win.accepted_values);

  // flag search-box pressure: optimal segment speeds at or past the bound
  double top_speed = 0.0;
  for (std::size_t j = 0; j + 1 < result.curve.nodes.size(); ++j) {
    const Vec v = (result.curve.nodes[j + 1] - result.curve.nodes[j]) / result.curve.dt;
    top_speed = std::max(top_speed, v.norm());
  }
  result.velocity_bound_hit = top_speed > v_box * (1.0 - 1e-9);
  return result;
}

}  // namespace dhj
