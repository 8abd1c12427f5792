#include "dhj/regime.hpp"

#include <cmath>

#include "dhj/detail/optim.hpp"

namespace dhj {

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::NonPositive: return "NonPositive";
    case Regime::Subcritical: return "Subcritical";
    case Regime::Unsupported: return "Unsupported";
  }
  return "?";
}

namespace {

// lambda_max of a symmetric 1x1 or 2x2 matrix, closed form
double lambda_max_sym(const Mat& m) {
  if (m.rows() == 1) return m(0, 0);
  const double tr = m(0, 0) + m(1, 1);
  const double diff = m(0, 0) - m(1, 1);
  const double disc = std::sqrt(diff * diff + 4.0 * m(0, 1) * m(1, 0));
  return 0.5 * (tr + disc);
}

}  // namespace

RMax compute_r(const Problem& prob, int scan_per_axis) {
  if (scan_per_axis < 8) throw ConfigError("compute_r: scan_per_axis must be >= 8");
  auto best = detail::scan_refine_max(
      [&](const Vec& q) { return lambda_max_sym(prob.d2V(q)); },
      prob.domain, scan_per_axis, 1e-10);
  RMax out;
  out.r = best.value;
  out.argmax_q = best.arg;
  return out;
}

RegimeReport classify_regime(double r, double alpha) {
  if (!(alpha > 0.0)) throw ConfigError("classify_regime: alpha must be positive");
  RegimeReport rep;
  rep.r = r;
  rep.exponents = linearized_exponents(r, alpha);
  const double quarter = 0.25 * alpha * alpha;
  if (r <= 0.0) {
    rep.regime = Regime::NonPositive;
    rep.k_cap.reset();
    rep.note = "cap unbounded by the regime condition; realized smoothness is set by the "
               "potential, which is analytic here";
    return rep;
  }
  if (r < quarter) {
    rep.regime = Regime::Subcritical;
    const double s = std::sqrt(1.0 - 4.0 * r / (alpha * alpha));
    rep.s = s;
    const double bound = 2.0 / (1.0 - s);
    // strictly-below cap: an integer-valued bound is itself excluded
    const double nearest = std::round(bound);
    int cap;
    if (std::abs(bound - nearest) <= 1e-9 * std::max(1.0, std::abs(bound))) {
      cap = static_cast<int>(nearest) - 1;
    } else {
      cap = static_cast<int>(std::floor(bound));
    }
    rep.k_cap = cap;
    return rep;
  }
  rep.regime = Regime::Unsupported;
  rep.k_cap = 0;
  rep.deficit = r - quarter;
  return rep;
}

std::array<std::complex<double>, 2> linearized_exponents(double rho_local, double alpha) {
  if (!(alpha > 0.0)) throw ConfigError("linearized_exponents: alpha must be positive");
  const double disc = alpha * alpha - 4.0 * rho_local;
  if (disc >= 0.0) {
    const double slow = 0.5 * (-alpha + std::sqrt(disc));
    const double fast = -alpha - slow;  // keeps the real-part sum at exactly -alpha
    return {std::complex<double>(slow, 0.0), std::complex<double>(fast, 0.0)};
  }
  const double half = -0.5 * alpha;
  const double w = 0.5 * std::sqrt(-disc);
  return {std::complex<double>(half, w), std::complex<double>(half, -w)};
}

RegimeReport analyze_problem(const Problem& prob, int scan_per_axis) {
  const RMax rm = compute_r(prob, scan_per_axis);
  RegimeReport rep = classify_regime(rm.r, prob.alpha);
  rep.argmax_q = rm.argmax_q;
  return rep;
}

}  // namespace dhj
