#pragma once

#include <cstdint>
#include <vector>

#include "dhj/problem.hpp"

namespace dhj {

// Sign convention for the discounted action integrand.
//   Canonical:    1/2 v^T A^-1 v - <a,v> - V   (the solver's Lagrangian;
//                 the minimized value is directly a u estimate)
//   PaperLiteral: 1/2 v^T A^-1 v + <a,v> - V   (drift term sign flipped;
//                 the u estimate is minus the minimized value)
enum class Convention { Canonical, PaperLiteral };

// Piecewise-linear curve in the universal cover: nodes are unwrapped, so
// consecutive positions never jump across the cell; nodes[0] lifts q0.
struct Curve {
  Vec q0;
  double dt = 0.0;
  std::vector<Vec> nodes;

  double horizon() const { return dt * static_cast<double>(nodes.size() - 1); }
};

struct OracleConfig {
  double T = 1.0;
  int segments = 100;  // >= 8
  int restarts = 5;    // >= 1
  Convention convention = Convention::Canonical;
  std::uint64_t seed = 0;
  int max_iterations = 1000;  // descent iterations per restart
  double grad_tol = 1e-9;
};

// Truncated discounted action of the curve: midpoint integrand per segment,
// exact exp(-alpha t) weight per segment.
double action_value(const Problem& prob, const Curve& curve, Convention convention);

// d(action_value)/d(node_k) for k = 1..N (node 0 fixed, last node free).
std::vector<Vec> action_gradient(const Problem& prob, const Curve& curve, Convention convention);

// Truncation control: |J_inf - J_T| <= exp(-alpha T) * M_L / alpha with M_L
// a bound on the integrand magnitude over energy-bounded curves.
double tail_bound(const Problem& prob, double T);

struct OracleResult {
  double u_estimate = 0.0;  // in the convention's sign, comparable to solver u
  double best_value = 0.0;  // minimized truncated action
  Curve curve;
  double tail = 0.0;  // tail_bound at the configured horizon
  bool velocity_bound_hit = false;
  int best_restart = 0;
  int iterations = 0;                  // accepted steps of the winning restart
  std::vector<double> accepted_values; // objective after each accepted step
};

// Multistart Barzilai-Borwein descent with backtracking over curves from
// q0: the stationary curve plus seeded random constant-velocity starts.
// Deterministic for a fixed seed. Throws NumericalError when every restart
// fails its first line search.
OracleResult minimize_action(const Problem& prob, const Vec& q0, const OracleConfig& config);

}  // namespace dhj
