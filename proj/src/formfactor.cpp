#include "fcs/formfactor.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>

namespace fcs {

namespace {

constexpr const char* kModule = "formfactor_engine";
constexpr double kOnShellTolerance = 1e-8;
constexpr double kHardCollision = 1e-10;
constexpr double kConditionWarning = 1e12;

using Quad = QuadComplex;

RationalKit<Quad> quad_kit(const ChainConfig& cfg) { return make_quad_kit(cfg); }
SideScalars<Quad> quad_scalars(const MabaSide& side) { return quad_side_scalars(side); }
std::vector<Quad> to_quad(std::span<const Complex> xs) { return to_scalars<Quad>(xs); }

// Determinant and the ratio of extreme LU pivots as a cheap conditioning proxy.
template <class T>
T determinant_with_condition(const BasicMatrix<T>& m, double& condition) {
  if (m.rows() == 0) {
    condition = 1.0;
    return T(1);
  }
  auto f = lu_factor(m);
  T det = T(f.sign);
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    det *= f.lu(i, i);
    const double p = magnitude(f.lu(i, i));
    lo = std::min(lo, p);
    hi = std::max(hi, p);
  }
  condition = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  return f.singular ? T(0) : det;
}

void require_on_shell(const RapiditySet& set, const MabaSide& side, const ChainConfig& cfg) {
  const auto res = bethe_residual(set, side, cfg);
  const double worst = res.empty() ? 0.0 : *std::max_element(res.begin(), res.end());
  if (!(worst <= kOnShellTolerance)) {
    throw Error(ErrorKind::kNotOnShell, kModule,
                "rapidity set is not on shell (residual " + std::to_string(worst) + ")");
  }
}

void require_disjoint(std::span<const Complex> v, std::span<const Complex> u) {
  const double scale = 1.0 + std::max(max_abs(v), max_abs(u));
  for (std::size_t k = 0; k < v.size(); ++k) {
    for (std::size_t j = 0; j < u.size(); ++j) {
      if (std::abs(v[k] - u[j]) < kHardCollision * scale) {
        throw Error(ErrorKind::kCollision, kModule,
                    "rapidities collide: v[" + std::to_string(k) + "] and u[" + std::to_string(j) + "]");
      }
    }
  }
}

double min_cross_separation(std::span<const Quad> u, std::span<const Quad> v) {
  double scale = 1.0;
  for (const auto& x : u) scale = std::max(scale, 1.0 + magnitude(x));
  for (const auto& x : v) scale = std::max(scale, 1.0 + magnitude(x));
  double best = std::numeric_limits<double>::infinity();
  for (const auto& a : u)
    for (const auto& b : v) best = std::min(best, magnitude(Quad(a - b)) / scale);
  return best;
}

// Mean over L + 2 points of a circle around u: exact for polynomials of degree <= L + 1.
Complex circle_mean(Complex u, const RapiditySet& set, const MabaSide& side, const ChainConfig& cfg) {
  const auto kit = make_kit(cfg);
  const auto s = side_scalars(side);
  const int points = cfg.length + 2;
  const double radius = 0.1 * std::abs(cfg.c);
  Complex sum = 0.0;
  for (int p = 0; p < points; ++p) {
    const double angle = 0.3 + 2.0 * std::numbers::pi * p / points;
    const Complex z = u + std::polar(radius, angle);
    sum += lambda_value(kit, s, z, std::span<const Complex>(set.roots));
  }
  return sum / static_cast<double>(points);
}

bool near_any_root(Complex u, std::span<const Complex> roots) {
  const double scale = root_scale(roots);
  return std::any_of(roots.begin(), roots.end(),
                     [&](Complex r) { return std::abs(u - r) < kHardCollision * scale; });
}

// phi Delta(on) Delta'(off) d(on) / g(off, on) det J(off; on) in extended precision.
Quad slavnov_kernel(std::span<const Quad> on, std::span<const Quad> off, const MabaSide& side,
                    const ChainConfig& cfg) {
  const auto kit = quad_kit(cfg);
  const auto s = quad_scalars(side);
  const auto jac = lambda_jacobian(kit, s, off, on);
  return kit.delta(on) * kit.delta_prime(off) * kit.d_set(on) / kit.g_set(off, on) * determinant(jac);
}

Complex to_c(const Quad& z) { return to_complex(z); }

}  // namespace

Complex lambda_eigenvalue(Complex u, const RapiditySet& set, const MabaSide& side, const ChainConfig& cfg) {
  if (near_any_root(u, set.roots)) {
    require_on_shell(set, side, cfg);
    return circle_mean(u, set, side, cfg);
  }
  return lambda_value(make_kit(cfg), side_scalars(side), u, std::span<const Complex>(set.roots));
}

Complex lambda_at_zero(const RapiditySet& set, const MabaSide& side, const ChainConfig& cfg) {
  if (near_any_root(0.0, set.roots)) {
    require_on_shell(set, side, cfg);
    return circle_mean(0.0, set, side, cfg);
  }
  return fcs::lambda_at_zero(make_kit(cfg), side_scalars(side), std::span<const Complex>(set.roots));
}

CMatrix lambda_jacobian(std::span<const Complex> v, const RapiditySet& u, const MabaSide& side,
                        const ChainConfig& cfg) {
  require_disjoint(v, u.roots);
  return fcs::lambda_jacobian(make_kit(cfg), side_scalars(side), v, std::span<const Complex>(u.roots));
}

CMatrix norm_jacobian(const RapiditySet& set, const MabaSide& side, const ChainConfig& cfg) {
  if (min_relative_separation(set.roots) < kCollisionTolerance) {
    throw Error(ErrorKind::kCollision, kModule, "coincident rapidities in norm Jacobian");
  }
  return gaudin_matrix(make_kit(cfg), side_scalars(side), std::span<const Complex>(set.roots));
}

ExtendedSet refine_extended(const RapiditySet& set, const MabaSide& side, const ChainConfig& cfg) {
  const auto res =
      newton_solve(quad_kit(cfg), quad_scalars(side), extended_roots(set), kExtendedTarget, kExtendedMaxIter);
  return {res.roots, res.residual};
}

Complex slavnov_overlap(const RapiditySet& on_shell, std::span<const Complex> off_shell, const MabaSide& side,
                        Complex vacuum_factor, const ChainConfig& cfg) {
  require_on_shell(on_shell, side, cfg);
  require_disjoint(off_shell, on_shell.roots);
  const ExtendedSet on = refine_extended(on_shell, side, cfg);
  const auto off = to_quad(off_shell);
  return vacuum_factor * to_c(slavnov_kernel(on.roots, off, side, cfg));
}

Complex cross_twist_overlap(const RapiditySet& on_shell_tilde, std::span<const Complex> off_shell,
                            const RhoData& rho, Complex vacuum_factor_tilde, const ChainConfig& cfg) {
  const Complex ratio = std::pow(rho.side.mu / rho.tilde.mu, cfg.length);
  return ratio * slavnov_overlap(on_shell_tilde, off_shell, rho.tilde, vacuum_factor_tilde, cfg);
}

Complex norm(const RapiditySet& on_shell, const MabaSide& side, Complex vacuum_factor, const ChainConfig& cfg) {
  require_on_shell(on_shell, side, cfg);
  const ExtendedSet on = refine_extended(on_shell, side, cfg);
  const auto kit = quad_kit(cfg);
  const std::span<const Quad> r(on.roots);
  const Quad value = kit.delta(r) * kit.delta_prime(r) * kit.d_set(r) * determinant(gaudin_matrix(kit, quad_scalars(side), r));
  return vacuum_factor * to_c(value);
}

std::vector<Complex> reference_off_shell(const ChainConfig& cfg) {
  std::vector<Complex> w;
  for (int j = 0; j < cfg.length; ++j) w.push_back(Complex(0.5, 0.3 * j) * cfg.c);
  return w;
}

Complex vacuum_factor_from_reference(const RapiditySet& on_shell, const MabaSide& side, const ChainConfig& cfg) {
  const auto w = reference_off_shell(cfg);
  const Complex oracle = bethe_overlap(side, on_shell.roots, side, w, cfg);
  return oracle / slavnov_overlap(on_shell, w, side, 1.0, cfg);
}

Complex FormFactorTerm::weight(int ell) const {
  Quad w = prefactor;
  for (int i = 0; i < ell; ++i) w *= ratio_base;
  return to_c(w);
}

Complex FormFactorTerm::ratio() const { return to_c(ratio_base); }

OnShellState prepare_state(const RapiditySet& set, const MabaSide& side, const ChainConfig& cfg) {
  if (set.cls != RootClass::kAdmissible) {
    throw Error(ErrorKind::kNotOnShell, kModule, "selected state has no admissible rapidity set");
  }
  OnShellState st;
  st.set = refine_extended(set, side, cfg);
  const auto kit = quad_kit(cfg);
  const auto s = quad_scalars(side);
  const std::span<const Quad> r(st.set.roots);
  st.lambda0 = fcs::lambda_at_zero(kit, s, r);
  st.gaudin_det = determinant(gaudin_matrix(kit, s, r));
  return st;
}

FormFactorTerm fcs_term(const OnShellState& u_state, const SpectralLine& line_v, const RhoData& rho,
                        const ChainConfig& cfg) {
  if (line_v.rapidities.cls != RootClass::kAdmissible) {
    throw Error(ErrorKind::kNotOnShell, kModule, "form-factor term needs an admissible K~ line");
  }
  const auto kit = quad_kit(cfg);
  const auto sk = quad_scalars(rho.side);
  const auto st = quad_scalars(rho.tilde);
  const ExtendedSet v = refine_extended(line_v.rapidities, rho.tilde, cfg);
  const std::span<const Quad> uq(u_state.set.roots);
  const std::span<const Quad> vq(v.roots);

  FormFactorTerm term;
  term.eigen_index = line_v.eigen_index;
  term.min_separation = min_cross_separation(uq, vq);
  if (term.min_separation < kHardCollision) {
    throw Error(ErrorKind::kCollision, kModule,
                "K and K~ rapidities collide on line " + std::to_string(line_v.eigen_index));
  }

  double cond_jk = 0.0, cond_jt = 0.0, cond_gt = 0.0;
  const Quad det_jk = determinant_with_condition(lambda_jacobian(kit, sk, vq, uq), cond_jk);
  const Quad det_jt = determinant_with_condition(lambda_jacobian(kit, st, uq, vq), cond_jt);
  const Quad det_gt = determinant_with_condition(gaudin_matrix(kit, st, vq), cond_gt);
  const Quad gg = kit.g_set(uq, vq) * kit.g_set(vq, uq);

  term.prefactor = det_jk * det_jt / (gg * u_state.gaudin_det * det_gt);
  term.ratio_base = u_state.lambda0 / fcs::lambda_at_zero(kit, st, vq);

  const std::string tag = "line " + std::to_string(line_v.eigen_index) + ": ";
  if (cond_jk > kConditionWarning) term.warnings.push_back(tag + "ill-conditioned K Jacobian");
  if (cond_jt > kConditionWarning) term.warnings.push_back(tag + "ill-conditioned K~ Jacobian");
  if (cond_gt > kConditionWarning) term.warnings.push_back(tag + "ill-conditioned K~ norm matrix");
  if (v.residual > 1e-20) term.warnings.push_back(tag + "extended refinement stalled");
  return term;
}

std::vector<Complex> fcs_oracle(const Twist& k, const Beta& beta, std::span<const int> ells, const ChainConfig& cfg,
                                std::size_t state) {
  const TransferEigenData data = transfer_eigen_data(k, cfg, false);
  const std::size_t idx = data.select(state);
  std::vector<Complex> out;
  for (const int ell : ells) out.push_back(fcs_direct(data, idx, CountingSpec{beta, ell}, cfg));
  return out;
}

FcsResult fcs_sum(const Twist& k, const Beta& beta, std::span<const int> ells, const ChainConfig& cfg,
                  const FcsOptions& options) {
  cfg.require_even();
  for (const int ell : ells) {
    if (ell < 0 || ell > cfg.length) {
      throw Error(ErrorKind::kInvalidArgument, kModule, "ell must lie in 0..L, got " + std::to_string(ell));
    }
  }
  FcsResult result;
  result.twist = k;
  result.beta = beta;
  result.ells.assign(ells.begin(), ells.end());
  result.twist_tilde = tilde_twist(k, beta);

  const CountingSpec zero_check{beta, 0};
  if (zero_check.is_zero()) {
    result.trivial = true;
    result.values.assign(ells.size(), Complex(1.0));
    if (options.with_oracle) result.oracle = fcs_oracle(k, beta, ells, cfg, options.state);
    return result;
  }

  const auto branches = solve_rho_link(k, result.twist_tilde);
  result.branch_count = branches.size();
  if (options.branch < 0 || static_cast<std::size_t>(options.branch) >= branches.size()) {
    throw Error(ErrorKind::kInvalidArgument, kModule,
                "rho branch " + std::to_string(options.branch) + " unavailable (" + std::to_string(branches.size()) +
                    " branches)");
  }
  result.rho = branches[static_cast<std::size_t>(options.branch)];

  const TransferEigenData k_data = transfer_eigen_data(k, cfg, false);
  const std::size_t idx = k_data.select(options.state);
  result.state_index = idx;
  const TransferEigenData kt_data = transfer_eigen_data(result.twist_tilde, cfg, true);

  const SpectralLine u_line = solve_line(k_data.states[idx], idx, result.rho.side, cfg);
  const OnShellState u_state = prepare_state(u_line.rapidities, result.rho.side, cfg);
  result.state_line = u_line;
  result.spectrum = enumerate_spectrum(kt_data, result.rho.tilde, cfg, options.parallel);
  const auto& v_lines = result.spectrum;
  result.lines = v_lines.size();
  result.admissible = count_admissible(v_lines);

  const std::size_t n = v_lines.size();
  std::vector<FormFactorTerm> terms(n);
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic) if (options.parallel)
  for (std::ptrdiff_t ii = 0; ii < count; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    if (v_lines[i].rapidities.cls != RootClass::kAdmissible) continue;
    try {
      terms[i] = fcs_term(u_state, v_lines[i], result.rho, cfg);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<EigenbasisTerm> oracle_terms;
  if (result.admissible != n) oracle_terms = eigenbasis_terms(k_data, idx, kt_data);

  std::vector<Quad> sums(ells.size(), Quad(0));
  for (std::size_t i = 0; i < n; ++i) {
    if (v_lines[i].rapidities.cls != RootClass::kAdmissible) {
      result.excluded.push_back({i, v_lines[i].rapidities.cls, oracle_terms[i].weight});
      continue;
    }
    const auto& t = terms[i];
    for (std::size_t e = 0; e < ells.size(); ++e) {
      Quad w = t.prefactor;
      for (int p = 0; p < ells[e]; ++p) w *= t.ratio_base;
      sums[e] += w;
    }
    result.warnings.insert(result.warnings.end(), t.warnings.begin(), t.warnings.end());
    result.terms.push_back(t);
  }
  for (const auto& s : sums) result.values.push_back(to_c(s));

  if (options.with_oracle) {
    for (const int ell : ells) result.oracle.push_back(fcs_direct(k_data, idx, CountingSpec{beta, ell}, cfg));
  }
  return result;
}

}  // namespace fcs
