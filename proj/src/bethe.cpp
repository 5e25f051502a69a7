#include "fcs/bethe.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

namespace fcs {

namespace {

constexpr const char* kModule = "bethe_engine";

CVector padded(const CPoly& p, std::size_t size) {
  CVector out(size, 0.0);
  for (std::size_t j = 0; j < std::min(size, p.coeffs().size()); ++j) out[j] = p[j];
  return out;
}

// (u + s)^j
CPoly shifted_monomial(std::size_t j, Complex s) {
  CPoly p(CVector{1.0});
  const CPoly lin(CVector{s, 1.0});
  for (std::size_t k = 0; k < j; ++k) p = p * lin;
  return p;
}

bool lex_less(Complex a, Complex b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

}  // namespace

std::string_view to_string(RootClass cls) {
  switch (cls) {
    case RootClass::kAdmissible: return "admissible";
    case RootClass::kSpurious: return "spurious";
    case RootClass::kUnresolved: return "unresolved";
  }
  return "unresolved";
}

RationalKit<Complex> make_kit(const ChainConfig& cfg) { return {cfg.c, cfg.length}; }

SideScalars<Complex> side_scalars(const MabaSide& side) {
  return {side.twist.k1, side.twist.k2, side.rho1, side.rho2};
}

RationalKit<QuadComplex> make_quad_kit(const ChainConfig& cfg) { return {to_scalar<QuadComplex>(cfg.c), cfg.length}; }

SideScalars<QuadComplex> quad_side_scalars(const MabaSide& side) {
  return {to_scalar<QuadComplex>(side.twist.k1), to_scalar<QuadComplex>(side.twist.k2),
          to_scalar<QuadComplex>(side.rho1), to_scalar<QuadComplex>(side.rho2)};
}

TqSolution tq_fit(const CPoly& lambda, const MabaSide& side, const ChainConfig& cfg, TqShift shift) {
  cfg.require_even();
  const auto len = static_cast<std::size_t>(cfg.length);
  if (lambda.degree() > len) {
    throw Error(ErrorKind::kInvalidArgument, kModule, "eigenvalue polynomial degree exceeds L");
  }
  const Complex c = cfg.c;
  const Complex scale_ad = std::pow(c, -static_cast<int>(len));
  const CPoly av = scale_ad * CPoly::from_roots(CVector(len, -c));  // ((u + c)/c)^L
  const CPoly dv = scale_ad * CPoly::monomial(len);                 // (u/c)^L
  const Complex ca = side.twist.k1 - side.rho1;
  const Complex cd = side.twist.k2 - side.rho2;
  const Complex ci = std::pow(c, static_cast<int>(len)) * (side.rho1 + side.rho2);
  const Complex shift_a = shift == TqShift::kMinusOnA ? -c : c;
  const Complex shift_d = -shift_a;

  const std::size_t rows = 2 * len + 1;
  // R_j: residual polynomial contributed by the monomial u^j of Q
  std::vector<CVector> columns(len + 1);
  std::vector<double> term_scale(len + 1, 0.0);
  for (std::size_t j = 0; j <= len; ++j) {
    const CPoly lq = lambda * CPoly::monomial(j);
    const CPoly aq = ca * (av * shifted_monomial(j, shift_a));
    const CPoly dq = cd * (dv * shifted_monomial(j, shift_d));
    columns[j] = padded(lq - aq - dq, rows);
    term_scale[j] = std::max({lq.max_coeff_abs(), aq.max_coeff_abs(), dq.max_coeff_abs()});
  }
  const CVector inhom = padded(ci * (av * dv), rows);

  CMatrix m(rows, len);
  CVector rhs(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < len; ++j) m(r, j) = columns[j][r];
    rhs[r] = inhom[r] - columns[len][r];
  }
  const LeastSquaresResult ls = least_squares(m, rhs);

  CVector q(ls.x);
  q.push_back(1.0);
  // residual relative to the largest coefficient among the TQ terms
  CVector total(rows, 0.0);
  double scale = max_abs(inhom);
  for (std::size_t j = 0; j <= len; ++j) {
    for (std::size_t r = 0; r < rows; ++r) total[r] += q[j] * columns[j][r];
    scale = std::max(scale, std::abs(q[j]) * term_scale[j]);
  }
  for (std::size_t r = 0; r < rows; ++r) total[r] -= inhom[r];
  TqSolution sol;
  sol.q = CPoly(q);
  sol.residual = max_abs(total) / std::max(scale, 1e-300);
  return sol;
}

TqSolution tq_solve(const CPoly& lambda, const MabaSide& side, const ChainConfig& cfg) {
  TqSolution sol = tq_fit(lambda, side, cfg);
  if (!(sol.residual <= kTqTolerance)) {
    throw Error(ErrorKind::kTqInconsistent, kModule,
                "TQ relation not satisfied (relative residual " + std::to_string(sol.residual) + ")");
  }
  return sol;
}

RapiditySet roots_of_Q(const CPoly& q) {
  RapiditySet set;
  set.roots = poly_roots(q);
  std::sort(set.roots.begin(), set.roots.end(), lex_less);
  return set;
}

double root_scale(std::span<const Complex> roots) { return 1.0 + max_abs(roots); }

double min_relative_separation(std::span<const Complex> roots) {
  double best = std::numeric_limits<double>::infinity();
  const double scale = root_scale(roots);
  for (std::size_t i = 0; i < roots.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) best = std::min(best, std::abs(roots[i] - roots[j]) / scale);
  return best;
}

std::vector<QuadComplex> extended_roots(const RapiditySet& set) {
  if (set.extended.size() == set.roots.size()) return set.extended;
  return to_scalars<QuadComplex>(set.roots);
}

std::vector<double> bethe_residual(const RapiditySet& set, const MabaSide& side, const ChainConfig& cfg) {
  if (min_relative_separation(set.roots) < kCollisionTolerance) {
    throw Error(ErrorKind::kCollision, kModule, "coincident rapidities");
  }
  const auto roots = extended_roots(set);
  return normalized_bethe_residuals(make_quad_kit(cfg), quad_side_scalars(side), std::span<const QuadComplex>(roots));
}

RapiditySet newton_refine(const RapiditySet& set, const MabaSide& side, const ChainConfig& cfg) {
  RapiditySet out = set;
  out.cls = RootClass::kUnresolved;
  out.extended.clear();
  if (min_relative_separation(set.roots) < kCollisionTolerance) return out;
  const auto coarse = newton_solve(make_kit(cfg), side_scalars(side), set.roots, kNewtonTarget, kNewtonMaxIter);
  const auto fine = newton_solve(make_quad_kit(cfg), quad_side_scalars(side), to_scalars<QuadComplex>(coarse.roots),
                                 kExtendedTarget, kExtendedMaxIter);
  out.extended = fine.roots;
  out.roots.clear();
  for (const auto& r : fine.roots) out.roots.push_back(to_complex(r));
  out.residual = fine.residual;
  return out;
}

RapiditySet classify(const RapiditySet& set, const MabaSide& side, const ChainConfig& cfg) {
  RapiditySet out = set;
  if (min_relative_separation(set.roots) < kCollisionTolerance) {
    out.cls = RootClass::kSpurious;
    return out;
  }
  const auto kit = make_quad_kit(cfg);
  const auto s = quad_side_scalars(side);
  const auto roots = extended_roots(set);
  const double coefficient_scale =
      magnitude(s.k1 - s.rho1) + magnitude(s.k2 - s.rho2) + magnitude(s.rho1 + s.rho2);
  double worst = 0.0;
  for (std::size_t k = 0; k < roots.size(); ++k) {
    const auto terms = y_terms(kit, s, roots[k], std::span<const QuadComplex>(roots), k);
    if (terms.largest() < kVanishingTerms * coefficient_scale) {
      out.cls = RootClass::kSpurious;
      return out;
    }
    worst = std::max(worst, magnitude(terms.sum()) / terms.largest());
  }
  out.residual = worst;
  out.cls = worst <= kAdmissibleResidual ? RootClass::kAdmissible : RootClass::kUnresolved;
  return out;
}

SpectralLine solve_line(const TransferEigenState& state, std::size_t index, const MabaSide& side,
                        const ChainConfig& cfg) {
  SpectralLine line;
  line.eigen_index = index;
  line.lambda = state.lambda;
  const TqSolution sol = tq_solve(state.lambda, side, cfg);
  line.q = sol.q;
  line.tq_residual = sol.residual;
  line.rapidities = classify(newton_refine(roots_of_Q(sol.q), side, cfg), side, cfg);
  return line;
}

std::vector<SpectralLine> enumerate_spectrum(const TransferEigenData& data, const MabaSide& side,
                                             const ChainConfig& cfg, bool parallel) {
  cfg.require_even();
  const std::size_t n = data.states.size();
  std::vector<SpectralLine> lines(n);
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::ptrdiff_t ii = 0; ii < count; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    try {
      lines[i] = solve_line(data.states[i], i, side, cfg);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const Error& e) {
      throw Error(e.kind(), kModule, std::string(e.what()) + " [eigen_index " + std::to_string(i) + "]");
    }
  }
  return lines;
}

std::size_t count_admissible(const std::vector<SpectralLine>& lines) {
  return static_cast<std::size_t>(std::count_if(lines.begin(), lines.end(), [](const SpectralLine& l) {
    return l.rapidities.cls == RootClass::kAdmissible;
  }));
}

TqShift calibrate_tq_shift() {
  ChainConfig cfg;
  cfg.length = 2;
  const Twist k = Twist::sigma_x();
  const MabaSide side = make_side(k, 2.0, -0.5);
  const TransferEigenData data = transfer_eigen_data(k, cfg, false);
  double minus = 0.0;
  double plus = 0.0;
  for (const auto& st : data.states) {
    minus = std::max(minus, tq_fit(st.lambda, side, cfg, TqShift::kMinusOnA).residual);
    plus = std::max(plus, tq_fit(st.lambda, side, cfg, TqShift::kPlusOnA).residual);
  }
  return minus <= plus ? TqShift::kMinusOnA : TqShift::kPlusOnA;
}

}  // namespace fcs
