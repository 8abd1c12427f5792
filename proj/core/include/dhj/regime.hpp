#pragma once

#include <array>
#include <complex>
#include <optional>
#include <string>

#include "dhj/problem.hpp"

namespace dhj {

enum class Regime { NonPositive, Subcritical, Unsupported };

const char* regime_name(Regime r);

// Hypothesis check for the smooth-solution regime. k_cap semantics:
//   NonPositive  -> k_cap empty (unbounded; see note)
//   Subcritical  -> greatest integer strictly below 2 / (1 - s)
//   Unsupported  -> k_cap = 0, deficit = r - alpha^2/4
struct RegimeReport {
  double r = 0.0;
  Regime regime = Regime::NonPositive;
  std::optional<double> s;      // sqrt(1 - 4 r / alpha^2), Subcritical only
  std::optional<int> k_cap;     // empty means unbounded
  std::array<std::complex<double>, 2> exponents{};  // sorted by Re descending
  Vec argmax_q;                 // where r is attained (filled by analyze_problem)
  double deficit = 0.0;         // r - alpha^2/4 when Unsupported
  std::string note;
};

struct RMax {
  double r = 0.0;
  Vec argmax_q;
};

// Maximum eigenvalue of the potential Hessian over the torus: regular scan
// (scan_per_axis >= 8 nodes per axis) plus golden-section refinement to
// 1e-10 in q. Deterministic; never returns less than the raw scan maximum.
RMax compute_r(const Problem& prob, int scan_per_axis);

RegimeReport classify_regime(double r, double alpha);

// Rest-point Jacobian eigenvalues of the dissipative flow where the local
// Hessian eigenvalue is rho_local: the roots of mu^2 + alpha mu + rho = 0,
// sorted by real part descending (positive imaginary part first on ties).
// Stored so that the two real parts sum to exactly -alpha.
std::array<std::complex<double>, 2> linearized_exponents(double rho_local, double alpha);

// compute_r + classify_regime with argmax_q and exponents filled in.
RegimeReport analyze_problem(const Problem& prob, int scan_per_axis = 128);

}  // namespace dhj
