#include "dhj/detail/optim.hpp"

#include <algorithm>
#include <cmath>

namespace dhj::detail {

double golden_max(const std::function<double(double)>& f, double a, double b,
                  double xtol, double* x_best) {
  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  while (b - a > xtol) {
    if (f1 >= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = f(x2);
    }
  }
  const double xm = 0.5 * (a + b);
  const double fm = f(xm);
  if (fm >= f1 && fm >= f2) {
    *x_best = xm;
    return fm;
  }
  if (f1 >= f2) {
    *x_best = x1;
    return f1;
  }
  *x_best = x2;
  return f2;
}

ScanMax scan_refine_max(const std::function<double(const Vec&)>& f,
                        const TorusDomain& domain, int per_axis, double xtol) {
  const int dim = domain.dim;
  const int n0 = per_axis;
  const int n1 = dim == 2 ? per_axis : 1;

  Vec h = domain.periods;
  for (int d = 0; d < dim; ++d) h[d] = domain.periods[d] / per_axis;

  ScanMax best;
  best.value = -std::numeric_limits<double>::infinity();
  Vec q(dim);
  for (int i = 0; i < n0; ++i) {
    q[0] = i * h[0];
    for (int j = 0; j < n1; ++j) {
      if (dim == 2) q[1] = j * h[1];
      const double val = f(q);
      // strict improvement only: ties keep the lexicographically smallest q
      if (val > best.value) {
        best.value = val;
        best.arg = q;
      }
    }
  }

  // Golden-section refinement on the bracket [q* - h, q* + h] per axis.
  Vec x = best.arg;
  if (dim == 1) {
    double xb = x[0];
    const double val = golden_max(
        [&](double t) {
          Vec qq(1);
          qq[0] = t;
          return f(qq);
        },
        x[0] - h[0], x[0] + h[0], xtol, &xb);
    if (val > best.value) {
      best.value = val;
      Vec qq(1);
      qq[0] = xb;
      best.arg = wrap_point(domain, qq);
    }
    return best;
  }

  // 2-D: coordinate-wise golden-section passes until q stops moving.
  double val = best.value;
  for (int pass = 0; pass < 100; ++pass) {
    Vec x_prev = x;
    for (int axis = 0; axis < 2; ++axis) {
      double xb = x[axis];
      Vec probe = x;
      const double axis_val = golden_max(
          [&](double t) {
            probe[axis] = t;
            return f(probe);
          },
          x[axis] - h[axis], x[axis] + h[axis], xtol, &xb);
      if (axis_val >= val) {
        val = axis_val;
        x[axis] = xb;
      }
    }
    if ((x - x_prev).cwiseAbs().maxCoeff() < xtol) break;
  }
  if (val > best.value) {
    best.value = val;
    best.arg = wrap_point(domain, x);
  }
  return best;
}

}  // namespace dhj::detail
