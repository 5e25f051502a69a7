#pragma once

// 2x2 twist algebra: the counting-shifted twist, the K = B D A factorisation
// and the linked rho-parameters shared by a pair of twists.

#include <vector>

#include "fcs/numkernel.hpp"

namespace fcs {

// K = [[k1, kp], [km, k2]]
struct Twist {
  Complex k1 = 1.0;
  Complex k2 = 1.0;
  Complex kp = 0.0;
  Complex km = 0.0;

  static Twist from_matrix(const CMatrix& m);
  static Twist sigma_x() { return {0.0, 0.0, 1.0, 1.0}; }
  static Twist sigma_y() { return {0.0, 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0)}; }
  static Twist identity() { return {1.0, 1.0, 0.0, 0.0}; }

  CMatrix matrix() const;
  Complex gamma() const { return k1 * k2 - kp * km; }
  Complex trace() const { return k1 + k2; }
  double max_abs() const;
  // off-diagonal entries nonzero, as the modified construction requires
  bool generic() const { return kp != Complex(0.0) && km != Complex(0.0); }
};

struct CountingSpec {
  Beta beta{};
  int ell = 0;

  // principal root of beta . beta
  Complex r() const { return pauli_radius(beta); }
  bool is_zero() const { return beta[0] == Complex(0.0) && beta[1] == Complex(0.0) && beta[2] == Complex(0.0); }
};

// K~ = K exp(-Q(beta)) via the closed-form 2x2 exponential.
Twist tilde_twist(const Twist& k, const Beta& beta);

// One twist with its modified-construction parameters.
struct MabaSide {
  Twist twist;
  Complex rho1 = 0.0;
  Complex rho2 = 0.0;
  Complex mu = 1.0;  // 1 / (1 - rho1 rho2 / (kp km))
};

// Builds a side, computing mu. Throws kNonGeneric on vanishing kp/km or at
// the mu pole.
MabaSide make_side(const Twist& k, Complex rho1, Complex rho2);

// |(rho1 - k1)(rho2 - k2) - gamma| relative to the size of its terms.
double constraint_residual(const Twist& k, Complex rho1, Complex rho2);

struct RhoData {
  MabaSide side;   // K
  MabaSide tilde;  // K~
  int branch_id = 0;

  Complex rho1() const { return side.rho1; }
  Complex rho2() const { return side.rho2; }
  Complex rho1_tilde() const { return tilde.rho1; }
  Complex rho2_tilde() const { return tilde.rho2; }
  Complex mu() const { return side.mu; }
  Complex mu_tilde() const { return tilde.mu; }
};

// All branches of the linked constraints, ordered by (re, im) of rho1.
// Linking: rho~_i km = rho_i km~.
std::vector<RhoData> solve_rho_link(const Twist& k, const Twist& k_tilde);

struct BdaFactors {
  CMatrix b;
  CMatrix d;
  CMatrix a;
  Complex mu;
};

// K = B D A with D = diag(k1 - rho1, k2 - rho2).
BdaFactors decompose_bda(const Twist& k, Complex rho1, Complex rho2);

}  // namespace fcs
