#include "dhj/phase_flow.hpp"

#include <algorithm>
#include <cmath>

namespace dhj {

void dissipative_field(const Problem& prob, const Vec& q, const Vec& p, Vec* q_dot, Vec* p_dot) {
  *q_dot = prob.metric.A * (p + prob.drift.a);
  *p_dot = -prob.dV(q) - prob.alpha * p;
}

Trajectory rk4_integrate(const Problem& prob, const PhaseState& z0, double dt, double T) {
  if (!(dt > 0.0) || !(T >= dt)) throw ConfigError("rk4_integrate: need dt > 0 and T >= dt");

  const long n_steps = static_cast<long>(std::ceil(T / dt - 1e-12));
  Trajectory traj;
  traj.reserve(n_steps + 1);

  Vec q = z0.q;  // lifted: never wrapped during integration
  Vec p = z0.p;
  traj.push_back({0.0, make_state(prob.domain, q, p)});

  Vec k1q(prob.dim()), k1p(prob.dim()), k2q(prob.dim()), k2p(prob.dim());
  Vec k3q(prob.dim()), k3p(prob.dim()), k4q(prob.dim()), k4p(prob.dim());
  for (long k = 1; k <= n_steps; ++k) {
    dissipative_field(prob, q, p, &k1q, &k1p);
    dissipative_field(prob, q + 0.5 * dt * k1q, p + 0.5 * dt * k1p, &k2q, &k2p);
    dissipative_field(prob, q + 0.5 * dt * k2q, p + 0.5 * dt * k2p, &k3q, &k3p);
    dissipative_field(prob, q + dt * k3q, p + dt * k3p, &k4q, &k4p);
    q += dt / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
    p += dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
    if (!all_finite(q) || !all_finite(p)) {
      throw NumericalError("rk4_integrate: trajectory blew up at t = " + std::to_string(k * dt));
    }
    traj.push_back({k * dt, make_state(prob.domain, q, p)});
  }
  return traj;
}

GraphSampler::GraphSampler(const Problem& prob, const GridField& u) : prob_(prob) {
  const std::vector<GridField> grad = numerical_gradient(u);
  grad_interp_.reserve(grad.size());
  for (const GridField& g : grad) {
    GridField cubic = g;
    cubic.interp = InterpKind::Cubic;
    grad_interp_.emplace_back(cubic);
  }
  // mismatch against differentiating the interpolated field itself
  FieldInterpolator ui(u);
  double worst = 0.0;
  for (std::size_t idx = 0; idx < u.size(); ++idx) {
    const Vec x = u.node_point(idx);
    const Vec g1 = ui.gradient(x);
    Vec g2(u.dim());
    for (int d = 0; d < u.dim(); ++d) g2[d] = grad[d].values[idx];
    worst = std::max(worst, (g1 - g2).cwiseAbs().maxCoeff());
  }
  consistency_ = worst;
}

Vec GraphSampler::du(const Vec& q) const {
  Vec g(static_cast<int>(grad_interp_.size()));
  for (std::size_t d = 0; d < grad_interp_.size(); ++d) g[d] = grad_interp_[d].value(q);
  return g;
}

double GraphSampler::deviation(const PhaseState& z) const {
  const Vec w = z.p - du(z.q);
  return std::sqrt(w.dot(prob_.metric.A * w));
}

double GraphSampler::gradient_consistency() const { return consistency_; }

double graph_invariance_error(const Problem& prob, const GridField& u, const Vec& q0, double dt,
                              double T) {
  GraphSampler sampler(prob, u);
  const Vec q = wrap_point(prob.domain, q0);
  const PhaseState z0 = make_state(prob.domain, q, sampler.du(q));
  const Trajectory traj = rk4_integrate(prob, z0, dt, T);
  double worst = 0.0;
  for (const TrajectoryPoint& pt : traj) {
    worst = std::max(worst, sampler.deviation(pt.z));
  }
  return worst;
}

double attraction_fit(const Problem& prob, const GridField& u, const PhaseState& z0, double dt,
                      double T, double t0, double t1, double noise_floor) {
  GraphSampler sampler(prob, u);
  if (noise_floor <= 0.0) {
    const double h = u.min_spacing();
    noise_floor = std::max(1e-12, 0.5 * h * h);
  }
  const double initial = sampler.deviation(z0);
  if (initial < 100.0 * noise_floor) {
    throw NumericalError("attraction_fit: degenerate fit, start deviates by " +
                         std::to_string(initial) + " < 100x the noise floor");
  }

  const Trajectory traj = rk4_integrate(prob, z0, dt, T);
  std::vector<double> ts, logs;
  for (const TrajectoryPoint& pt : traj) {
    if (pt.t < t0 || pt.t > t1) continue;
    const double dev = sampler.deviation(pt.z);
    if (dev <= noise_floor) continue;
    ts.push_back(pt.t);
    logs.push_back(std::log(dev));
  }
  if (ts.size() < 5) {
    throw NumericalError("attraction_fit: degenerate fit, fewer than 5 samples above the "
                         "noise floor in the window");
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
  return -num / den;
}

}  // namespace dhj
