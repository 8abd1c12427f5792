#pragma once

#include <array>
#include <utility>
#include <vector>

#include "dhj/grid_field.hpp"
#include "dhj/problem.hpp"
#include "dhj/sl_solver.hpp"

namespace dhj {

// Error history of an evolved field against a reference solution.
// value_error is the sup norm of v_t - u_ref; grad_error is the max over
// axes of the sup norm of the centered first-difference mismatch.
struct ConvergenceTrace {
  std::vector<double> times;
  std::vector<double> value_error;
  std::vector<double> grad_error;
};

enum class TraceChannel { Value, Grad };

struct LfOptions {
  double cfl = 0.9;           // dt * (sum_i sigma_i/h_i + alpha) <= cfl
  double dt = 0.0;            // 0: tightest dt allowed by cfl
  double slope_margin = 1.0;  // slope-box inflation per axis
};

// Per-axis dissipation from the slope box [min du_i - margin, max du_i + margin]
// (du by centered differences): sigma_i = max |dH/dp_i| over the box corners.
Vec lf_sigma(const Problem& prob, const GridField& u, double slope_margin = 1.0);

// Monotone numerical Hamiltonian:
//   Hhat = H(x, (p- + p+)/2) - 1/2 sum_i sigma_i (p_i+ - p_i-).
double lf_hamiltonian(const Problem& prob, const Vec& x, const Vec& p_minus,
                      const Vec& p_plus, const Vec& sigma);

// Forward-Euler step u' = u - dt * (Hhat(x, D-u, D+u) + alpha u) with
// one-sided differences. ConfigError on CFL violation, NumericalError on
// non-finite output.
GridField step_explicit(const Problem& prob, const GridField& u, double dt, const Vec& sigma);

// Convenience overload: sigma recomputed from u's slope box.
GridField step_explicit(const Problem& prob, const GridField& u, double dt);

// Steady state by marching from v0 = 0 until the per-step sup-change falls
// to tol. sigma is fixed from the initial slope box for the whole run.
std::pair<GridField, SolveStats> solve_lf_steady(const Problem& prob, std::array<int, 2> nodes,
                                                 double tol = 1e-10, const LfOptions& opts = {});

// Marches v0 to time T, recording errors against u_ref roughly every
// sample_every time units (always including t = 0 and the final time).
// Inputs are not mutated. Step failures are rethrown tagged with the time.
ConvergenceTrace evolve_cauchy(const Problem& prob, const GridField& v0, const GridField& u_ref,
                               double T, double sample_every, const LfOptions& opts = {});

// Least-squares slope of log(error) over window [t0, t1]; positive result
// means decay like exp(-rate * t). Needs >= 5 samples above 1e-13
// (NumericalError otherwise).
double fit_decay_rate(const ConvergenceTrace& trace, TraceChannel channel, double t0, double t1);

}  // namespace dhj
