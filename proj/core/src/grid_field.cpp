#include "dhj/grid_field.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>

namespace dhj {

double GridField::min_spacing() const {
  double h = spacing(0);
  if (dim() == 2) h = std::min(h, spacing(1));
  return h;
}

Vec GridField::node_point(std::size_t flat) const {
  Vec q(dim());
  const int i = static_cast<int>(flat) / nodes[1];
  const int j = static_cast<int>(flat) % nodes[1];
  q[0] = i * spacing(0);
  if (dim() == 2) q[1] = j * spacing(1);
  return q;
}

double GridField::sup_norm() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

GridField GridField::zeros(const TorusDomain& domain, std::array<int, 2> nodes,
                           InterpKind interp) {
  domain.validate();
  GridField f;
  f.domain = domain;
  f.nodes = nodes;
  if (domain.dim == 1) f.nodes[1] = 1;
  for (int d = 0; d < domain.dim; ++d) {
    if (f.nodes[d] < 2) throw ConfigError("grid needs at least 2 nodes per axis");
  }
  f.interp = interp;
  f.values.assign(static_cast<std::size_t>(f.nodes[0]) * f.nodes[1], 0.0);
  return f;
}

GridField GridField::constant(const TorusDomain& domain, std::array<int, 2> nodes, double c,
                              InterpKind interp) {
  GridField f = zeros(domain, nodes, interp);
  std::fill(f.values.begin(), f.values.end(), c);
  return f;
}

GridField GridField::sample(const TorusDomain& domain, std::array<int, 2> nodes,
                            const std::function<double(const Vec&)>& f, InterpKind interp) {
  GridField out = zeros(domain, nodes, interp);
  for (std::size_t i = 0; i < out.size(); ++i) out.values[i] = f(out.node_point(i));
  return out;
}

double sup_distance(const GridField& a, const GridField& b) {
  if (a.size() != b.size()) throw ConfigError("sup_distance: grid size mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(a.values[i] - b.values[i]));
  }
  return m;
}

namespace detail {

namespace {
// FFTW's planner is not thread-safe; execution of a built plan is.
std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

void fft_axis_filter(std::vector<double>& data, int n0, int n1, int axis,
                     const std::function<std::complex<double>(int, int)>& symbol) {
  const int n = axis == 0 ? n0 : n1;
  const int lines = axis == 0 ? n1 : n0;
  const int nc = n / 2 + 1;

  std::vector<double> line(n);
  std::vector<std::complex<double>> freq(nc);

  fftw_plan fwd, bwd;
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    fwd = fftw_plan_dft_r2c_1d(n, line.data(), reinterpret_cast<fftw_complex*>(freq.data()),
                               FFTW_ESTIMATE);
    bwd = fftw_plan_dft_c2r_1d(n, reinterpret_cast<fftw_complex*>(freq.data()), line.data(),
                               FFTW_ESTIMATE);
  }

  for (int l = 0; l < lines; ++l) {
    for (int i = 0; i < n; ++i) {
      line[i] = axis == 0 ? data[static_cast<std::size_t>(i) * n1 + l]
                          : data[static_cast<std::size_t>(l) * n1 + i];
    }
    fftw_execute(fwd);
    for (int k = 0; k < nc; ++k) {
      freq[k] *= symbol(k, n) / static_cast<double>(n);
    }
    fftw_execute(bwd);
    for (int i = 0; i < n; ++i) {
      (axis == 0 ? data[static_cast<std::size_t>(i) * n1 + l]
                 : data[static_cast<std::size_t>(l) * n1 + i]) = line[i];
    }
  }

  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
  }
}

namespace {

// Uniform cubic B-spline basis on t in [0,1): weights for coefficients at
// offsets -1, 0, 1, 2 from the base node, plus derivative weights.
inline void bspline_weights(double t, double w[4], double dw[4], double ddw[4]) {
  const double t2 = t * t;
  const double t3 = t2 * t;
  w[0] = (1.0 - 3.0 * t + 3.0 * t2 - t3) / 6.0;
  w[1] = (4.0 - 6.0 * t2 + 3.0 * t3) / 6.0;
  w[2] = (1.0 + 3.0 * t + 3.0 * t2 - 3.0 * t3) / 6.0;
  w[3] = t3 / 6.0;
  dw[0] = -0.5 * (1.0 - t) * (1.0 - t);
  dw[1] = -2.0 * t + 1.5 * t2;
  dw[2] = 0.5 + t - 1.5 * t2;
  dw[3] = 0.5 * t2;
  ddw[0] = 1.0 - t;
  ddw[1] = -2.0 + 3.0 * t;
  ddw[2] = 1.0 - 3.0 * t;
  ddw[3] = t;
}

inline int wrap_index(int i, int n) {
  i %= n;
  return i < 0 ? i + n : i;
}

}  // namespace

}  // namespace detail

FieldInterpolator::FieldInterpolator(const GridField& field)
    : domain_(field.domain), nodes_(field.nodes), kind_(field.interp), coef_(field.values) {
  if (kind_ == InterpKind::Cubic) {
    for (int d = 0; d < domain_.dim; ++d) {
      if (nodes_[d] < 4) throw ConfigError("cubic interpolation needs >= 4 nodes per axis");
    }
    // Prefilter so the spline interpolates the nodal values: divide by the
    // B-spline symbol (4 + 2 cos(2 pi k / n)) / 6 along each axis.
    for (int axis = 0; axis < domain_.dim; ++axis) {
      detail::fft_axis_filter(coef_, nodes_[0], nodes_[1], axis,
                              [](int k, int n) -> std::complex<double> {
                                const double c =
                                    (4.0 + 2.0 * std::cos(2.0 * std::numbers::pi * k / n)) / 6.0;
                                return 1.0 / c;
                              });
    }
  }
}

void FieldInterpolator::eval(const Vec& q, double* val, Vec* grad, Mat* hess) const {
  const int dim = domain_.dim;
  // grid-unit coordinate and base node per axis
  double frac[2];
  int base[2] = {0, 0};
  for (int d = 0; d < dim; ++d) {
    const double x = q[d] / domain_.periods[d] * nodes_[d];
    double fl = std::floor(x);
    double t = x - fl;
    if (t >= 1.0) {  // guard against floor rounding at cell edges
      fl += 1.0;
      t = 0.0;
    }
    base[d] = detail::wrap_index(static_cast<int>(fl), nodes_[d]);
    frac[d] = t;
  }

  if (kind_ == InterpKind::Linear) {
    int i0 = base[0], i1 = detail::wrap_index(base[0] + 1, nodes_[0]);
    const double t0 = frac[0];
    if (dim == 1) {
      const double a = coef_[i0], b = coef_[i1];
      if (val) *val = (1.0 - t0) * a + t0 * b;
      if (grad) {
        grad->resize(1);
        (*grad)[0] = (b - a) / (domain_.periods[0] / nodes_[0]);
      }
      if (hess) *hess = Mat::Zero(1, 1);
      return;
    }
    int j0 = base[1], j1 = detail::wrap_index(base[1] + 1, nodes_[1]);
    const double t1 = frac[1];
    const double h0 = domain_.periods[0] / nodes_[0];
    const double h1 = domain_.periods[1] / nodes_[1];
    const double f00 = coef_[static_cast<std::size_t>(i0) * nodes_[1] + j0];
    const double f01 = coef_[static_cast<std::size_t>(i0) * nodes_[1] + j1];
    const double f10 = coef_[static_cast<std::size_t>(i1) * nodes_[1] + j0];
    const double f11 = coef_[static_cast<std::size_t>(i1) * nodes_[1] + j1];
    if (val) {
      *val = (1.0 - t0) * ((1.0 - t1) * f00 + t1 * f01) + t0 * ((1.0 - t1) * f10 + t1 * f11);
    }
    if (grad) {
      grad->resize(2);
      (*grad)[0] = ((1.0 - t1) * (f10 - f00) + t1 * (f11 - f01)) / h0;
      (*grad)[1] = ((1.0 - t0) * (f01 - f00) + t0 * (f11 - f10)) / h1;
    }
    if (hess) *hess = Mat::Zero(2, 2);
    return;
  }

  double w0[4], d0[4], s0[4];
  detail::bspline_weights(frac[0], w0, d0, s0);
  const double h0 = domain_.periods[0] / nodes_[0];

  if (dim == 1) {
    double v = 0.0, g = 0.0, s = 0.0;
    for (int a = 0; a < 4; ++a) {
      const double c = coef_[detail::wrap_index(base[0] - 1 + a, nodes_[0])];
      v += w0[a] * c;
      g += d0[a] * c;
      s += s0[a] * c;
    }
    if (val) *val = v;
    if (grad) {
      grad->resize(1);
      (*grad)[0] = g / h0;
    }
    if (hess) {
      hess->resize(1, 1);
      (*hess)(0, 0) = s / (h0 * h0);
    }
    return;
  }

  double w1[4], d1[4], s1[4];
  detail::bspline_weights(frac[1], w1, d1, s1);
  const double h1 = domain_.periods[1] / nodes_[1];

  // collapse axis 1 first: per row, value / d / dd in the axis-1 direction
  double rv[4], rg[4], rs[4];
  for (int a = 0; a < 4; ++a) {
    const int ia = detail::wrap_index(base[0] - 1 + a, nodes_[0]);
    const double* row = coef_.data() + static_cast<std::size_t>(ia) * nodes_[1];
    double v = 0.0, g = 0.0, s = 0.0;
    for (int b = 0; b < 4; ++b) {
      const double c = row[detail::wrap_index(base[1] - 1 + b, nodes_[1])];
      v += w1[b] * c;
      g += d1[b] * c;
      s += s1[b] * c;
    }
    rv[a] = v;
    rg[a] = g;
    rs[a] = s;
  }
  double v = 0.0, gx = 0.0, gy = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (int a = 0; a < 4; ++a) {
    v += w0[a] * rv[a];
    gx += d0[a] * rv[a];
    gy += w0[a] * rg[a];
    sxx += s0[a] * rv[a];
    syy += w0[a] * rs[a];
    sxy += d0[a] * rg[a];
  }
  if (val) *val = v;
  if (grad) {
    grad->resize(2);
    (*grad)[0] = gx / h0;
    (*grad)[1] = gy / h1;
  }
  if (hess) {
    hess->resize(2, 2);
    (*hess)(0, 0) = sxx / (h0 * h0);
    (*hess)(1, 1) = syy / (h1 * h1);
    (*hess)(0, 1) = (*hess)(1, 0) = sxy / (h0 * h1);
  }
}

double FieldInterpolator::value(const Vec& q) const {
  double v = 0.0;
  eval(q, &v, nullptr, nullptr);
  return v;
}

Vec FieldInterpolator::gradient(const Vec& q) const {
  Vec g(domain_.dim);
  eval(q, nullptr, &g, nullptr);
  return g;
}

Mat FieldInterpolator::hessian(const Vec& q) const {
  Mat h(domain_.dim, domain_.dim);
  eval(q, nullptr, nullptr, &h);
  return h;
}

std::vector<GridField> numerical_gradient(const GridField& u, DiffKind kind) {
  for (int d = 0; d < u.dim(); ++d) {
    if (u.nodes[d] < 4) throw ConfigError("numerical_gradient needs >= 4 nodes per axis");
  }
  std::vector<GridField> out;
  out.reserve(u.dim());

  if (kind == DiffKind::Spectral) {
    for (int axis = 0; axis < u.dim(); ++axis) {
      GridField g = u;
      const double L = u.domain.periods[axis];
      detail::fft_axis_filter(g.values, u.nodes[0], u.nodes[1], axis,
                              [L](int k, int n) -> std::complex<double> {
                                if (2 * k == n) return 0.0;  // drop the Nyquist mode
                                const double freq = 2.0 * std::numbers::pi * k / L;
                                return std::complex<double>(0.0, freq);
                              });
      out.push_back(std::move(g));
    }
    return out;
  }

  for (int axis = 0; axis < u.dim(); ++axis) {
    GridField g = GridField::zeros(u.domain, u.nodes, u.interp);
    const double inv2h = 1.0 / (2.0 * u.spacing(axis));
    const int n0 = u.nodes[0], n1 = u.nodes[1];
    for (int i = 0; i < n0; ++i) {
      for (int j = 0; j < n1; ++j) {
        const int ip = axis == 0 ? detail::wrap_index(i + 1, n0) : i;
        const int im = axis == 0 ? detail::wrap_index(i - 1, n0) : i;
        const int jp = axis == 1 ? detail::wrap_index(j + 1, n1) : j;
        const int jm = axis == 1 ? detail::wrap_index(j - 1, n1) : j;
        g.at(i, j) = (u.at(ip, jp) - u.at(im, jm)) * inv2h;
      }
    }
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace dhj
