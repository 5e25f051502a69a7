#pragma once

// Bethe rapidities from transfer-eigenvalue polynomials: TQ solve, roots of
// Q, Newton refinement on the Bethe equations, classification.

#include <cstddef>
#include <limits>
#include <string_view>
#include <vector>

#include "fcs/numkernel.hpp"
#include "fcs/rational_kit.hpp"
#include "fcs/spin_oracle.hpp"
#include "fcs/twist.hpp"

namespace fcs {

enum class RootClass { kUnresolved, kAdmissible, kSpurious };
std::string_view to_string(RootClass cls);

struct RapiditySet {
  std::vector<Complex> roots;
  // Same roots carried in extended precision after refinement; empty for
  // user-supplied sets. Near-strings (u_i - u_j close to c) lose their
  // on-shell residual when rounded to double.
  std::vector<QuadComplex> extended;
  double residual = std::numeric_limits<double>::infinity();
  RootClass cls = RootClass::kUnresolved;
};

struct SpectralLine {
  std::size_t eigen_index = 0;
  CPoly lambda;
  CPoly q;
  double tq_residual = 0.0;
  RapiditySet rapidities;
};

// Which argument shift of Q multiplies a(u) in
// Lambda Q = (k1 - rho1) a Q(u -/+ c) + (k2 - rho2) d Q(u +/- c) + c^L (rho1 + rho2) a d.
enum class TqShift { kMinusOnA, kPlusOnA };
inline constexpr TqShift kTqShift = TqShift::kMinusOnA;

inline constexpr double kTqTolerance = 1e-8;
inline constexpr double kAdmissibleResidual = 1e-10;
inline constexpr double kCollisionTolerance = 1e-8;
inline constexpr double kNewtonTarget = 1e-12;
inline constexpr int kNewtonMaxIter = 50;
inline constexpr double kExtendedTarget = 1e-28;
inline constexpr int kExtendedMaxIter = 12;
// Terms of one Bethe equation that vanish together mark a spurious solution.
// Evaluated in extended precision, so the bound can sit far below the
// smallest term a near-string produces.
inline constexpr double kVanishingTerms = 1e-24;

RationalKit<Complex> make_kit(const ChainConfig& cfg);
SideScalars<Complex> side_scalars(const MabaSide& side);
RationalKit<QuadComplex> make_quad_kit(const ChainConfig& cfg);
SideScalars<QuadComplex> quad_side_scalars(const MabaSide& side);

struct TqSolution {
  CPoly q;
  double residual = 0.0;  // max coefficient mismatch over the largest term coefficient
};

// Least-squares monic Q; never throws on a large residual.
TqSolution tq_fit(const CPoly& lambda, const MabaSide& side, const ChainConfig& cfg, TqShift shift = kTqShift);
// As tq_fit, but a residual above kTqTolerance raises kTqInconsistent.
TqSolution tq_solve(const CPoly& lambda, const MabaSide& side, const ChainConfig& cfg);

// Roots sorted by (re, im); class left unresolved.
RapiditySet roots_of_Q(const CPoly& q);

// 1 + max |root|
double root_scale(std::span<const Complex> roots);
// Smallest pairwise distance relative to root_scale; infinity for < 2 roots.
double min_relative_separation(std::span<const Complex> roots);

// Extended-precision copy of the roots: set.extended when present.
std::vector<QuadComplex> extended_roots(const RapiditySet& set);

// |Phi_k| normalised by the largest of its three terms, evaluated in extended
// precision. Coincident roots raise kCollision.
std::vector<double> bethe_residual(const RapiditySet& set, const MabaSide& side, const ChainConfig& cfg);

// Double Newton (target kNewtonTarget), continued in extended precision.
RapiditySet newton_refine(const RapiditySet& set, const MabaSide& side, const ChainConfig& cfg);
RapiditySet classify(const RapiditySet& set, const MabaSide& side, const ChainConfig& cfg);

// tq_solve -> roots_of_Q -> newton_refine -> classify for one oracle state.
SpectralLine solve_line(const TransferEigenState& state, std::size_t index, const MabaSide& side,
                        const ChainConfig& cfg);
// All states, in eigen_index order. Lines are processed in parallel unless
// parallel is false.
std::vector<SpectralLine> enumerate_spectrum(const TransferEigenData& data, const MabaSide& side,
                                             const ChainConfig& cfg, bool parallel = true);

std::size_t count_admissible(const std::vector<SpectralLine>& lines);

// Picks the TQ shift convention that reproduces the oracle at L = 2.
TqShift calibrate_tq_shift();

}  // namespace fcs
