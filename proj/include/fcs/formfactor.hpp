#pragma once

// On-shell scalar quantities (eigenvalue function, Jacobians, overlaps,
// norms) and the form-factor sum for the counting statistics.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fcs/bethe.hpp"
#include "fcs/numkernel.hpp"
#include "fcs/rational_kit.hpp"
#include "fcs/spin_oracle.hpp"
#include "fcs/twist.hpp"

namespace fcs {

// Lambda(u | set). Near a rapidity the pole-free value is recovered from a
// circle mean (exact for the on-shell polynomial); that path requires the set
// to be on shell.
Complex lambda_eigenvalue(Complex u, const RapiditySet& set, const MabaSide& side, const ChainConfig& cfg);
// Lambda(0 | set) from the single surviving term.
Complex lambda_at_zero(const RapiditySet& set, const MabaSide& side, const ChainConfig& cfg);

// Row k, column j: c dLambda(v_k | u)/du_j. Raises kCollision when some
// v_k and u_j coincide.
CMatrix lambda_jacobian(std::span<const Complex> v, const RapiditySet& u, const MabaSide& side,
                        const ChainConfig& cfg);
// Row k, column j: c dPhi_k/du_j, the matrix also used by Newton refinement.
CMatrix norm_jacobian(const RapiditySet& set, const MabaSide& side, const ChainConfig& cfg);

// Same-twist scalar product <0| C(on) B(off) |0>:
//   phi Delta(on) Delta'(off) d(on) / g(off, on) det J(off; on)
// where phi (vacuum_factor) depends on the on-shell set only.
Complex slavnov_overlap(const RapiditySet& on_shell, std::span<const Complex> off_shell, const MabaSide& side,
                        Complex vacuum_factor, const ChainConfig& cfg);
// <0| C~(on) B(off) |0> = (mu/mu~)^L times the K~ scalar product.
Complex cross_twist_overlap(const RapiditySet& on_shell_tilde, std::span<const Complex> off_shell,
                            const RhoData& rho, Complex vacuum_factor_tilde, const ChainConfig& cfg);
// <0| C(on) B(on) |0> = phi Delta(on) Delta'(on) d(on) det G(on).
Complex norm(const RapiditySet& on_shell, const MabaSide& side, Complex vacuum_factor, const ChainConfig& cfg);

// Fixed off-shell set used to read phi off the operator oracle.
std::vector<Complex> reference_off_shell(const ChainConfig& cfg);
Complex vacuum_factor_from_reference(const RapiditySet& on_shell, const MabaSide& side, const ChainConfig& cfg);

// Rapidities re-converged in extended precision.
struct ExtendedSet {
  std::vector<QuadComplex> roots;
  double residual = 0.0;
};
ExtendedSet refine_extended(const RapiditySet& set, const MabaSide& side, const ChainConfig& cfg);

// One summand of the form-factor sum: weight(ell) = prefactor * ratio_base^ell.
struct FormFactorTerm {
  std::size_t eigen_index = 0;
  QuadComplex prefactor;
  QuadComplex ratio_base;
  double min_separation = 0.0;  // min |u_i - v_j| / scale
  std::vector<std::string> warnings;

  Complex weight(int ell) const;
  Complex ratio() const;
};

// The K-side state data shared by every term.
struct OnShellState {
  ExtendedSet set;
  QuadComplex lambda0;
  QuadComplex gaudin_det;
};
OnShellState prepare_state(const RapiditySet& set, const MabaSide& side, const ChainConfig& cfg);

FormFactorTerm fcs_term(const OnShellState& u_state, const SpectralLine& line_v, const RhoData& rho,
                        const ChainConfig& cfg);

struct FcsOptions {
  std::size_t state = 0;   // rank in the energy ordering (0 = ground state)
  int branch = 0;          // rho branch
  bool with_oracle = false;
  bool parallel = true;
};

struct ExcludedLine {
  std::size_t eigen_index = 0;
  RootClass cls = RootClass::kUnresolved;
  Complex oracle_weight;  // its ell = 0 eigenbasis summand
};

struct FcsResult {
  Twist twist;
  Twist twist_tilde;
  Beta beta{};
  RhoData rho;
  std::size_t branch_count = 0;
  std::size_t state_index = 0;  // index into the transfer eigenbasis
  bool trivial = false;         // beta = 0 short-circuit
  std::vector<int> ells;
  std::vector<Complex> values;
  std::vector<Complex> oracle;  // filled when requested
  std::size_t lines = 0;
  std::size_t admissible = 0;
  SpectralLine state_line;            // the K state
  std::vector<SpectralLine> spectrum;  // all K~ lines, eigen_index order
  std::vector<FormFactorTerm> terms;
  std::vector<ExcludedLine> excluded;
  std::vector<std::string> warnings;
};

FcsResult fcs_sum(const Twist& k, const Beta& beta, std::span<const int> ells, const ChainConfig& cfg,
                  const FcsOptions& options = {});

// Direct evaluation only, same state selection as fcs_sum.
std::vector<Complex> fcs_oracle(const Twist& k, const Beta& beta, std::span<const int> ells, const ChainConfig& cfg,
                                std::size_t state);

}  // namespace fcs
