#include "dhj/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <utility>

#include "dhj/detail/optim.hpp"

namespace dhj {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

void TorusDomain::validate() const {
  if (dim != 1 && dim != 2) {
    throw ConfigError("domain.dim must be 1 or 2, got " + std::to_string(dim));
  }
  if (periods.size() != dim) {
    throw ConfigError("domain.periods must have one entry per axis");
  }
  for (int d = 0; d < dim; ++d) {
    if (!(periods[d] > 0.0) || !std::isfinite(periods[d])) {
      throw ConfigError("domain.periods[" + std::to_string(d) + "] must be positive");
    }
  }
}

Vec wrap_point(const TorusDomain& domain, const Vec& q) {
  if (!all_finite(q)) throw std::domain_error("wrap_point: non-finite coordinate");
  Vec out = q;
  for (int d = 0; d < domain.dim; ++d) {
    const double L = domain.periods[d];
    double w = std::fmod(out[d], L);
    if (w < 0.0) w += L;
    if (w >= L) w = 0.0;  // fmod rounding can land exactly on L
    out[d] = w;
  }
  return out;
}

Vec torus_delta(const TorusDomain& domain, const Vec& a, const Vec& b) {
  Vec d(domain.dim);
  for (int i = 0; i < domain.dim; ++i) {
    const double L = domain.periods[i];
    double diff = std::remainder(b[i] - a[i], L);
    d[i] = diff;
  }
  return d;
}

void FourierPotential::validate(int dim) const {
  std::set<std::pair<int, int>> seen;
  for (std::size_t m = 0; m < modes.size(); ++m) {
    const auto& mode = modes[m];
    if (mode.k.size() != dim) {
      throw ConfigError("potential.modes[" + std::to_string(m) +
                        "].k must have one entry per axis");
    }
    if (!std::isfinite(mode.coeff.real()) || !std::isfinite(mode.coeff.imag())) {
      throw ConfigError("potential.modes[" + std::to_string(m) + "]: non-finite coefficient");
    }
    const int k0 = mode.k[0];
    const int k1 = dim == 2 ? mode.k[1] : 0;
    if (!seen.insert({k0, k1}).second) {
      throw ConfigError("potential.modes[" + std::to_string(m) + "]: duplicate wavevector");
    }
    if ((k0 != 0 || k1 != 0) && seen.count({-k0, -k1})) {
      throw ConfigError("potential.modes[" + std::to_string(m) +
                        "]: lists both k and -k; store one representative per pair");
    }
  }
}

namespace {

// phase gradient g_i = 2*pi*k_i / L_i for one mode
inline Vec mode_freq(const TorusDomain& domain, const FourierMode& mode) {
  Vec g(domain.dim);
  for (int d = 0; d < domain.dim; ++d) {
    g[d] = kTwoPi * mode.k[d] / domain.periods[d];
  }
  return g;
}

}  // namespace

double potential_eval(const TorusDomain& domain, const FourierPotential& pot, const Vec& q) {
  double v = 0.0;
  for (const auto& mode : pot.modes) {
    double theta = 0.0;
    for (int d = 0; d < domain.dim; ++d) theta += kTwoPi * mode.k[d] * q[d] / domain.periods[d];
    v += 2.0 * (mode.coeff.real() * std::cos(theta) - mode.coeff.imag() * std::sin(theta));
  }
  return v;
}

Vec potential_grad(const TorusDomain& domain, const FourierPotential& pot, const Vec& q) {
  Vec g = Vec::Zero(domain.dim);
  for (const auto& mode : pot.modes) {
    double theta = 0.0;
    for (int d = 0; d < domain.dim; ++d) theta += kTwoPi * mode.k[d] * q[d] / domain.periods[d];
    const double amp = -2.0 * (mode.coeff.real() * std::sin(theta) + mode.coeff.imag() * std::cos(theta));
    g += amp * mode_freq(domain, mode);
  }
  return g;
}

Mat potential_hess(const TorusDomain& domain, const FourierPotential& pot, const Vec& q) {
  Mat h = Mat::Zero(domain.dim, domain.dim);
  for (const auto& mode : pot.modes) {
    double theta = 0.0;
    for (int d = 0; d < domain.dim; ++d) theta += kTwoPi * mode.k[d] * q[d] / domain.periods[d];
    const double amp = 2.0 * (-mode.coeff.real() * std::cos(theta) + mode.coeff.imag() * std::sin(theta));
    const Vec f = mode_freq(domain, mode);
    h += amp * (f * f.transpose());
  }
  return h;
}

Metric Metric::make(const Mat& A) {
  if (A.rows() != A.cols() || A.rows() < 1 || A.rows() > 2) {
    throw ConfigError("metric must be a 1x1 or 2x2 matrix");
  }
  if (!all_finite(A)) throw ConfigError("metric: non-finite entry");
  const double scale = A.cwiseAbs().maxCoeff();
  if (!((A - A.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(scale, 1e-300))) {
    throw ConfigError("metric must be symmetric to 1e-12 relative");
  }
  Eigen::LLT<Mat> llt(A);
  if (llt.info() != Eigen::Success) {
    throw ConfigError("metric must be positive definite");
  }
  Metric m;
  m.A = A;
  m.A_inv = llt.solve(Mat::Identity(A.rows(), A.cols()));
  const Mat resid = m.A * m.A_inv - Mat::Identity(A.rows(), A.cols());
  if (resid.cwiseAbs().maxCoeff() > 1e-10) {
    throw ConfigError("metric inversion failed the 1e-10 identity check (ill-conditioned?)");
  }
  Eigen::SelfAdjointEigenSolver<Mat> eig(A);
  m.lambda_max = eig.eigenvalues().maxCoeff();
  return m;
}

void DriftForm::validate(int dim) const {
  if (a.size() != dim) throw ConfigError("drift must have one entry per axis");
  if (!all_finite(a)) throw ConfigError("drift: non-finite entry");
}

Problem Problem::make(TorusDomain domain, FourierPotential potential, Metric metric,
                      DriftForm drift, double alpha) {
  domain.validate();
  potential.validate(domain.dim);
  drift.validate(domain.dim);
  if (metric.A.rows() != domain.dim) {
    throw ConfigError("metric dimension does not match domain.dim");
  }
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw ConfigError("alpha must be positive");
  }

  Problem prob;
  prob.domain = std::move(domain);
  prob.potential = std::move(potential);
  prob.metric = std::move(metric);
  prob.drift = std::move(drift);
  prob.alpha = alpha;

  // Potential extrema, shared by the energy-set margin and velocity bounds.
  const int scan = prob.domain.dim == 1 ? 256 : 96;
  auto max_scan = detail::scan_refine_max(
      [&](const Vec& q) { return potential_eval(prob.domain, prob.potential, q); },
      prob.domain, scan, 1e-10);
  auto min_scan = detail::scan_refine_max(
      [&](const Vec& q) { return -potential_eval(prob.domain, prob.potential, q); },
      prob.domain, scan, 1e-10);
  prob.pot_max = max_scan.value;
  prob.pot_argmax = max_scan.arg;
  prob.pot_min = -min_scan.value;
  return prob;
}

PhaseState make_state(const TorusDomain& domain, Vec q, Vec p) {
  if (!all_finite(p)) throw std::domain_error("phase state: non-finite momentum");
  PhaseState z;
  z.q = wrap_point(domain, q);
  z.p = std::move(p);
  return z;
}

double hamiltonian(const Problem& prob, const Vec& p, const Vec& q) {
  const Vec s = p + prob.drift.a;
  return 0.5 * s.dot(prob.metric.A * s) + prob.V(q);
}

double lagrangian(const Problem& prob, const Vec& q, const Vec& v) {
  return 0.5 * v.dot(prob.metric.A_inv * v) - prob.drift.a.dot(v) - prob.V(q);
}

Vec legendre_momentum(const Problem& prob, const Vec& /*q*/, const Vec& v) {
  return prob.metric.A_inv * v - prob.drift.a;
}

double b_h_margin(const Problem& prob, const PhaseState& z) {
  const Vec& a = prob.drift.a;
  const double level = 0.5 * a.dot(prob.metric.A * a) + prob.pot_max;
  const double shifted_energy = 0.5 * z.p.dot(prob.metric.A * z.p) + prob.V(z.q);
  return level - shifted_energy;
}

double velocity_bound(const Problem& prob, double safety) {
  if (!(safety >= 1.0)) throw ConfigError("velocity_bound: safety must be >= 1");
  const Vec& a = prob.drift.a;
  const Vec Aa = prob.metric.A * a;
  // momenta on bounded trajectories satisfy 1/2 p^T A p <= E
  const double E = 0.5 * a.dot(Aa) + prob.osc_V();
  const double ap_max = std::sqrt(std::max(0.0, 2.0 * E * prob.metric.lambda_max));
  return safety * (ap_max + Aa.norm());
}

double solver_velocity_bound(const Problem& prob, double safety) {
  const double floor = 0.1 * prob.domain.periods.minCoeff() * prob.alpha;
  return std::max(velocity_bound(prob, safety), floor);
}

}  // namespace dhj
