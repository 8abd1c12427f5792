#pragma once

#include <complex>
#include <vector>

#include "dhj/types.hpp"

namespace dhj {

// Flat torus R^dim / (L_1 Z x ... x L_dim Z).
struct TorusDomain {
  int dim = 1;
  Vec periods;  // cell lengths L_i > 0

  void validate() const;  // throws ConfigError
};

// Canonical cell representative: each coordinate moved into [0, L_i) by an
// integer number of periods. Throws std::domain_error on non-finite input.
Vec wrap_point(const TorusDomain& domain, const Vec& q);

// Shortest signed displacement from a to b on the torus, per axis.
Vec torus_delta(const TorusDomain& domain, const Vec& a, const Vec& b);

// One stored representative per +-k pair; the conjugate partner is implied,
// so the evaluated potential is real by construction:
//   V(q) = sum_m 2 * Re( c_m * exp(i * 2*pi * sum_j k_j q_j / L_j) ).
// A k = 0 mode contributes the constant 2*Re(c).
struct FourierMode {
  IVec k;
  std::complex<double> coeff;
};

struct FourierPotential {
  std::vector<FourierMode> modes;

  void validate(int dim) const;  // distinct wavevectors, no +-k duplicates
};

double potential_eval(const TorusDomain& domain, const FourierPotential& pot, const Vec& q);
Vec potential_grad(const TorusDomain& domain, const FourierPotential& pot, const Vec& q);
Mat potential_hess(const TorusDomain& domain, const FourierPotential& pot, const Vec& q);

// Constant SPD kinetic matrix with its inverse computed once.
struct Metric {
  Mat A;
  Mat A_inv;
  double lambda_max = 1.0;  // largest eigenvalue of A

  // Validates symmetry (1e-12 relative), positive definiteness (Cholesky),
  // and A * A_inv = I to 1e-10. Throws ConfigError.
  static Metric make(const Mat& A);
};

struct DriftForm {
  Vec a;  // constant covector

  void validate(int dim) const;
};

// Full problem datum: H(p,q) = 1/2 (p+a)^T A (p+a) + V(q), discount alpha.
// Construction validates all component invariants and precomputes the
// potential extrema used by the derived bounds.
struct Problem {
  TorusDomain domain;
  FourierPotential potential;
  Metric metric;
  DriftForm drift;
  double alpha = 1.0;

  // extrema of V over the cell, located by scan + golden-section refinement
  double pot_max = 0.0;
  double pot_min = 0.0;
  Vec pot_argmax;

  static Problem make(TorusDomain domain, FourierPotential potential, Metric metric,
                      DriftForm drift, double alpha);

  int dim() const { return domain.dim; }
  double osc_V() const { return pot_max - pot_min; }

  double V(const Vec& q) const { return potential_eval(domain, potential, q); }
  Vec dV(const Vec& q) const { return potential_grad(domain, potential, q); }
  Mat d2V(const Vec& q) const { return potential_hess(domain, potential, q); }
};

// Point of phase space; q is stored wrapped into the canonical cell.
struct PhaseState {
  Vec q;
  Vec p;
};

PhaseState make_state(const TorusDomain& domain, Vec q, Vec p);

double hamiltonian(const Problem& prob, const Vec& p, const Vec& q);

// Legendre dual of the Hamiltonian: L(q,v) = 1/2 v^T A^-1 v - <a,v> - V(q).
double lagrangian(const Problem& prob, const Vec& q, const Vec& v);

// Momentum at which the Fenchel inequality is tight: p = A^-1 v - a.
Vec legendre_momentum(const Problem& prob, const Vec& q, const Vec& v);

// Signed margin of the bounded-trajectory energy set:
//   margin = (1/2 <A a, a> + max V) - (1/2 p^T A p + V(q)),
// nonnegative exactly when z belongs to the set.
double b_h_margin(const Problem& prob, const PhaseState& z);

// Upper bound on |A(p+a)| over the bounded-trajectory set, times safety.
// Returns 0 for a constant potential with zero drift; solvers that need a
// nonempty search interval use solver_velocity_bound instead.
double velocity_bound(const Problem& prob, double safety);

// velocity_bound with the degenerate-problem floor 0.1 * min(L_i) * alpha.
double solver_velocity_bound(const Problem& prob, double safety);

}  // namespace dhj
