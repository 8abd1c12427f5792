#pragma once

#include <array>
#include <functional>
#include <vector>

#include "dhj/problem.hpp"
#include "dhj/types.hpp"

namespace dhj {

enum class InterpKind { Linear, Cubic };
enum class DiffKind { Centered, Spectral };

// Periodic nodal scalar field. values are row-major over (N0, N1); in 1-D
// the second axis has extent 1. Node i of axis d sits at q_d = i * L_d / N_d.
struct GridField {
  TorusDomain domain;
  std::array<int, 2> nodes{1, 1};
  std::vector<double> values;
  InterpKind interp = InterpKind::Cubic;

  int dim() const { return domain.dim; }
  std::size_t size() const { return values.size(); }
  double spacing(int axis) const { return domain.periods[axis] / nodes[axis]; }
  double min_spacing() const;

  std::size_t index(int i, int j = 0) const {
    return static_cast<std::size_t>(i) * nodes[1] + j;
  }
  double& at(int i, int j = 0) { return values[index(i, j)]; }
  double at(int i, int j = 0) const { return values[index(i, j)]; }

  // flat index -> node coordinates
  Vec node_point(std::size_t flat) const;

  double sup_norm() const;

  static GridField zeros(const TorusDomain& domain, std::array<int, 2> nodes,
                         InterpKind interp = InterpKind::Cubic);
  static GridField constant(const TorusDomain& domain, std::array<int, 2> nodes, double c,
                            InterpKind interp = InterpKind::Cubic);
  static GridField sample(const TorusDomain& domain, std::array<int, 2> nodes,
                          const std::function<double(const Vec&)>& f,
                          InterpKind interp = InterpKind::Cubic);
};

double sup_distance(const GridField& a, const GridField& b);

// Periodic tensor-product interpolant of a nodal field. Linear gathers the
// 2^dim cell corners; Cubic is an interpolating cubic B-spline whose
// coefficients are prefiltered once at construction, giving C^2 values with
// analytic first and second derivatives.
class FieldInterpolator {
 public:
  explicit FieldInterpolator(const GridField& field);

  double value(const Vec& q) const;
  Vec gradient(const Vec& q) const;
  Mat hessian(const Vec& q) const;  // zero in Linear mode

  // single-pass value + derivatives for Newton loops
  void eval(const Vec& q, double* val, Vec* grad, Mat* hess) const;

  InterpKind kind() const { return kind_; }

 private:
  TorusDomain domain_;
  std::array<int, 2> nodes_;
  InterpKind kind_;
  std::vector<double> coef_;
};

// Per-axis derivative fields on the same nodes. Centered is second-order;
// Spectral differentiates the trigonometric interpolant (Nyquist mode
// dropped). Requires at least 4 nodes per axis.
std::vector<GridField> numerical_gradient(const GridField& u, DiffKind kind = DiffKind::Centered);

namespace detail {
// Applies a Fourier-symbol multiplier to every line of the field along one
// axis; symbol(k, n) receives the signed mode index k in (-n/2, n/2].
void fft_axis_filter(std::vector<double>& data, int n0, int n1, int axis,
                     const std::function<std::complex<double>(int, int)>& symbol);
}  // namespace detail

}  // namespace dhj
