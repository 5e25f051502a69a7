#pragma once

// Exact 2^L-dimensional realisation of the chain operators: R-matrix,
// monodromy and modified monodromy blocks, transfer matrices, Hamiltonians,
// shift and counting operators, and eigen-data of the transfer matrix.
//
// Basis: site 1 is the most significant tensor factor, spin up = 0, so the
// pseudo vacuum (all up) is basis vector 0.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "fcs/numkernel.hpp"
#include "fcs/twist.hpp"

namespace fcs {

struct ChainConfig {
  int length = 4;
  Complex c = 1.0;
  double coupling = 1.0;  // J of the boundary Hamiltonian

  // 1 <= L <= 10, c != 0
  void validate() const;
  // the Bethe pipeline additionally needs even L
  void require_even() const;
  std::size_t dimension() const { return std::size_t{1} << length; }

  // vacuum eigenvalues of A and D
  Complex a(Complex u) const;
  Complex d(Complex u) const;
};

enum class Block { kA, kB, kC, kD };

// Operator-valued 2x2 matrix over the auxiliary space: {{A, B}, {C, D}}.
struct Monodromy {
  CMatrix a, b, c, d;
  const CMatrix& block(Block which) const;
};

// (u/c) I + P on V (x) V.
CMatrix r_matrix(Complex u, const ChainConfig& cfg);
CMatrix permutation_matrix();

// R_{a1}(u) ... R_{aL}(u), built by sequential contraction over sites.
Monodromy monodromy(Complex u, const ChainConfig& cfg);
CMatrix monodromy_entry(Block which, Complex u, const ChainConfig& cfg);

// Blocks of A_m T(u) B_m for the factorisation of side.twist.
Monodromy modified_monodromy(Complex u, const MabaSide& side, const ChainConfig& cfg);
CMatrix modified_entry(Block which, Complex u, const MabaSide& side, const ChainConfig& cfg);

// k1 A + kp C + km B + k2 D
CMatrix transfer_matrix(const Twist& k, Complex u, const ChainConfig& cfg);

// op acting on one site (0-based) of the chain.
CMatrix site_operator(const CMatrix& op, int site, const ChainConfig& cfg);

// U |s1 s2 ... sL> = |s2 ... sL s1>, so X_i U = U X_{i+1}.
CMatrix shift_operator(const ChainConfig& cfg);

// exp(Q_1) ... exp(Q_ell) with identity on the remaining sites.
CMatrix counting_operator(const CountingSpec& spec, const ChainConfig& cfg);
// Same operator applied to a vector in O(ell 2^L).
CVector apply_counting(const CountingSpec& spec, std::span<const Complex> v, const ChainConfig& cfg);

// c t'(0) t(0)^{-1} + (L/2) I with t'(0) from exact Lagrange weights.
CMatrix hamiltonian_logderiv(const Twist& k, const ChainConfig& cfg);

// Coefficients M[a][b] with sigma^a_{L+1} = sum_b M[a][b] sigma^b_1 (a, b
// over x, y, z); equals K^{-1} sigma^a K.
std::array<std::array<Complex, 3>, 3> boundary_map(const Twist& k);

// J sum_{j<L} sigma_j . sigma_{j+1} + J sigma_L . sigma_{L+1}.
CMatrix hamiltonian_boundary(const Twist& k, const ChainConfig& cfg);

struct AffineFit {
  Complex alpha;
  Complex delta;
  double residual;  // max |target - alpha basis - delta I|
};

// Least-squares fit target = alpha basis + delta I.
AffineFit fit_affine(const CMatrix& target, const CMatrix& basis);

struct TransferEigenState {
  CPoly lambda;         // eigenvalue polynomial of t_K(u), degree L
  CVector left;         // bilinear dual, <left|right> = 1
  CVector right;
  Complex energy;       // c Lambda'(0)/Lambda(0) + L/2
  double joint_residual = 0.0;  // worst relative eigen-residual over the nodes
  bool degenerate = false;
};

struct TransferEigenData {
  Twist twist;
  std::vector<TransferEigenState> states;  // ordered as the eigenvalues at the diagonalisation point
  std::vector<std::size_t> energy_order;   // indices into states, ascending Re E, ties by Lambda(0)

  std::size_t select(std::size_t energy_rank) const;
};

// Interpolation nodes u_k = k - L/2, k = 0..L.
std::vector<Complex> interpolation_nodes(const ChainConfig& cfg);
// Generic point at which t_K is diagonalised.
Complex diagonalisation_point(const ChainConfig& cfg);

// With require_generic, any degenerate state or joint residual above 1e-8
// raises kNonGeneric.
TransferEigenData transfer_eigen_data(const Twist& k, const ChainConfig& cfg, bool require_generic = true);

// <l| exp(Q^(ell)) |r> / <l|r> for the selected state.
Complex fcs_direct(const TransferEigenData& data, std::size_t state, const CountingSpec& spec, const ChainConfig& cfg);
// Convenience form: diagonalises, picks the state by energy rank.
Complex fcs_direct(const Twist& k, const CountingSpec& spec, std::size_t energy_rank, const ChainConfig& cfg);

// One summand of the eigenbasis expansion over K~ states:
// <l|r~><l~|r>/(<l|r><l~|r~>) and the base (Lambda_K(0)/Lambda_K~(0)).
struct EigenbasisTerm {
  Complex weight;
  Complex ratio_base;
};
std::vector<EigenbasisTerm> eigenbasis_terms(const TransferEigenData& k_data, std::size_t state,
                                             const TransferEigenData& kt_data);

// B(u_1)...B(u_n)|0> and <0|C(u_1)...C(u_n) for the modified operators.
CVector bethe_vector(const MabaSide& side, std::span<const Complex> roots, const ChainConfig& cfg);
CVector dual_bethe_vector(const MabaSide& side, std::span<const Complex> roots, const ChainConfig& cfg);

// <0| C_{c_side}(v) B_{b_side}(u) |0>
Complex bethe_overlap(const MabaSide& c_side, std::span<const Complex> v, const MabaSide& b_side,
                      std::span<const Complex> u, const ChainConfig& cfg);

// Operator identities as residuals. Products are compared relative to the
// largest term; the identities with an O(1) right-hand side are absolute.
// R12(u-v) R13(u-w) R23(v-w) = R23(v-w) R13(u-w) R12(u-v)
double ybe_residual(Complex u, Complex v, Complex w, const ChainConfig& cfg);
// R_ab(u-v) T_a(u) T_b(v) = T_b(v) T_a(u) R_ab(u-v)
double rtt_residual(Complex u, Complex v, const ChainConfig& cfg);
// [t_K(u), t_K(v)]
double transfer_commutator_residual(const Twist& k, Complex u, Complex v, const ChainConfig& cfg);
// (t_K~(0))^-ell (t_K(0))^ell = prod_{i <= ell} exp(Q_i)
double quantum_inverse_residual(const Twist& k, const CountingSpec& spec, const ChainConfig& cfg);
// sum_i |r_i><l_i| / <l_i|r_i> = I
double resolution_residual(const TransferEigenData& data);

}  // namespace fcs
