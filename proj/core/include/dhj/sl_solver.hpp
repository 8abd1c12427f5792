#pragma once

#include <array>
#include <utility>

#include "dhj/grid_field.hpp"
#include "dhj/problem.hpp"

namespace dhj {

struct SolveStats {
  int iterations = 0;
  double final_sup_change = 0.0;
  double residual_inf = 0.0;
  double dt_dpp = 0.0;
};

struct SlOptions {
  double tol = 1e-8;
  double dt_dpp = 0.0;      // 0: 0.5 * min(h_i) / v_max, clamped to alpha*dt <= 0.5
  int max_iterations = 0;   // 0: 10 * ceil(ln(1/tol) / (alpha*dt))
  double safety = 1.0;      // velocity-bound factor for the search box
  InterpKind interp = InterpKind::Cubic;
};

// Default DPP step for the given grid spacing.
double default_dt_dpp(const Problem& prob, double min_spacing, double safety = 1.0);

// One dynamic-programming sweep:
//   (Tu)(x) = min_{|v|<=v_max} [ dt * L(x,v) + (1 - alpha*dt) * u(x - dt*v) ],
// u read through its periodic interpolant. Jacobi update, parallel over
// nodes. A sup-norm contraction with factor (1 - alpha*dt).
// Requires 0 < alpha*dt < 1 (ConfigError otherwise).
GridField dpp_apply(const Problem& prob, const GridField& u, double dt_dpp,
                    double safety = 1.0);

// Fixed point of the sweep above, iterated until the sup-change drops to
// opts.tol. Throws NumericalError past the iteration cap. Stats carry the
// residual of the returned field.
std::pair<GridField, SolveStats> solve_value_iteration(const Problem& prob,
                                                       std::array<int, 2> nodes,
                                                       const SlOptions& opts = {});

// max over nodes of |H(du(x), x) + alpha * u(x)| with du from
// numerical_gradient.
double hj_residual(const Problem& prob, const GridField& u,
                   DiffKind kind = DiffKind::Centered);

}  // namespace dhj
