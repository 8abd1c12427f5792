#pragma once

#include <functional>

#include "dhj/problem.hpp"

namespace dhj::detail {

// Derivative-free golden-section maximization on [a, b] to tolerance xtol
// in the argument. Returns the best function value, argument in *x_best.
double golden_max(const std::function<double(double)>& f, double a, double b,
                  double xtol, double* x_best);

struct ScanMax {
  double value = 0.0;
  Vec arg;
};

// Regular per_axis^dim scan over the torus cell followed by golden-section
// refinement around the best node (coordinate-wise passes in 2-D) to xtol
// in q. Scan ties go to the lexicographically smallest node; the result
// never falls below the raw scan maximum.
ScanMax scan_refine_max(const std::function<double(const Vec&)>& f,
                        const TorusDomain& domain, int per_axis, double xtol);

}  // namespace dhj::detail
