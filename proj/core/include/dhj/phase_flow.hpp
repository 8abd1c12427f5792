#pragma once

#include <vector>

#include "dhj/grid_field.hpp"
#include "dhj/problem.hpp"

namespace dhj {

struct TrajectoryPoint {
  double t = 0.0;
  PhaseState z;  // q wrapped, p as integrated
};

using Trajectory = std::vector<TrajectoryPoint>;

// Dissipative characteristic field: q_dot = A (p + a), p_dot = -dV/dq - alpha p.
void dissipative_field(const Problem& prob, const Vec& q, const Vec& p, Vec* q_dot, Vec* p_dot);

// Classical RK4 on the dissipative field: ceil(T/dt) full steps of dt,
// positions lifted internally and wrapped in the output. Throws
// NumericalError with the blow-up time on non-finite states.
Trajectory rk4_integrate(const Problem& prob, const PhaseState& z0, double dt, double T);

// du sampler for a solved field: the nodal centered gradient, carried by
// cubic interpolants (not the derivative of interpolated u). Also measures
// the mismatch between the two gradient estimates over the nodes.
class GraphSampler {
 public:
  GraphSampler(const Problem& prob, const GridField& u);

  Vec du(const Vec& q) const;
  // deviation |p - du(q)| in the metric norm |w|_A = sqrt(w^T A w)
  double deviation(const PhaseState& z) const;
  // sup over nodes of |grad(interp u) - interp(grad u)|, informational
  double gradient_consistency() const;

 private:
  const Problem& prob_;
  std::vector<FieldInterpolator> grad_interp_;
  double consistency_ = 0.0;
};

// Starts on the discrete graph at z0 = (du(q0), q0), integrates, and
// returns the max over samples of the metric-norm deviation |p(t) - du(q(t))|.
double graph_invariance_error(const Problem& prob, const GridField& u, const Vec& q0, double dt,
                              double T);

// Log-linear fit of the deviation decay over the window [t0, t1] for an
// off-graph start. noise_floor <= 0 picks max(1e-12, h_min^2 / 2).
// NumericalError when the start is closer than 100x the floor or fewer
// than 5 window samples clear it.
double attraction_fit(const Problem& prob, const GridField& u, const PhaseState& z0, double dt,
                      double T, double t0, double t1, double noise_floor = 0.0);

}  // namespace dhj
