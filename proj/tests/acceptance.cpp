// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <numeric>
#include <string>

#include "fcs/formfactor.hpp"
#include "support.hpp"

using namespace fcs;
using namespace fcs::testing;

namespace {

constexpr double kFcsSmall = 1e-8;  // L <= 6
constexpr double kFcsLarge = 1e-6;  // L = 8
constexpr double kSumRule = 1e-9;
constexpr double kBetheResidual = 1e-10;
constexpr double kTq = 1e-8;
constexpr double kLambda = 1e-8;
constexpr double kOverlap = 1e-8;
constexpr double kTerm = 1e-8;
constexpr double kJacobian = 1e-6;
constexpr double kFdStep = 1e-5;
constexpr double kInverse = 1e-10;
constexpr double kOperator = 1e-11;
constexpr double kResolution = 1e-9;
constexpr double kBranch = 1e-9;
constexpr double kHamiltonian = 1e-10;
constexpr double kAffine = 1e-9;
constexpr double kSu2 = 1e-9;

const Complex kProbes[] = {{0.31, 0.2}, {-0.7, 0.45}, {1.3, -0.6}, {0.05, 1.1}, {-1.9, -0.3}};

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  std::printf("criterion %2d: %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", x);
  return buf;
}

ChainConfig chain(int length) {
  ChainConfig cfg;
  cfg.length = length;
  return cfg;
}

std::vector<int> all_ells(int length) {
  std::vector<int> ells(static_cast<std::size_t>(length) + 1);
  std::iota(ells.begin(), ells.end(), 0);
  return ells;
}

struct Run {
  std::string label;
  Twist k;
  Beta beta;
  int length;
  FcsResult first;   // branch 0, with the direct values
  FcsResult second;  // branch 1
};

Run make_run(const std::string& label, const Twist& k, const Beta& beta, int length) {
  const ChainConfig cfg = chain(length);
  const auto ells = all_ells(length);
  FcsOptions opt;
  opt.with_oracle = true;
  Run run{label, k, beta, length, fcs_sum(k, beta, ells, cfg, opt), {}};
  opt.with_oracle = false;
  opt.branch = 1;
  run.second = fcs_sum(k, beta, ells, cfg, opt);
  return run;
}

double worst_fcs(const Run& run) {
  double worst = 0.0;
  for (std::size_t e = 0; e < run.first.values.size(); ++e)
    worst = std::max(worst, rel_err(run.first.values[e], run.first.oracle[e]));
  return worst;
}

std::string fcs_line(const std::vector<Run>& runs, bool& ok) {
  std::string detail;
  for (const Run& r : runs) {
    const double tol = r.length <= 6 ? kFcsSmall : kFcsLarge;
    const double w = worst_fcs(r);
    ok = ok && w <= tol;
    if (r.length == 2 || r.length == 8) detail += r.label + " L=" + std::to_string(r.length) + " " + sci(w) + "; ";
  }
  return detail + "tol 1e-8 (L<=6) / 1e-6 (L=8)";
}

Complex q_at(std::span<const Complex> roots, Complex u) {
  Complex q = 1.0;
  for (const Complex r : roots) q *= u - r;
  return q;
}

// c = 1: eigenvalue and Bethe residue written from Q directly.
Complex lambda_from_roots(const MabaSide& s, std::span<const Complex> roots, Complex u, int length) {
  const Complex a = std::pow(u + 1.0, length);
  const Complex d = std::pow(u, length);
  return ((s.twist.k1 - s.rho1) * a * q_at(roots, u - 1.0) + (s.twist.k2 - s.rho2) * d * q_at(roots, u + 1.0) +
          (s.rho1 + s.rho2) * a * d) /
         q_at(roots, u);
}

Complex residue(const MabaSide& s, std::span<const Complex> roots, std::size_t k, int length) {
  const Complex uk = roots[k];
  const Complex a = std::pow(uk + 1.0, length);
  const Complex d = std::pow(uk, length);
  return (s.twist.k1 - s.rho1) * a * q_at(roots, uk - 1.0) + (s.twist.k2 - s.rho2) * d * q_at(roots, uk + 1.0) +
         (s.rho1 + s.rho2) * a * d;
}

// Returns {lambda Jacobian error, norm Jacobian error}; lambda part is -1
// when the two sets nearly touch.
std::pair<double, double> jacobian_errors(std::span<const Complex> u, const RapiditySet& v, const MabaSide& side,
                                          const ChainConfig& cfg) {
  const std::size_t n = v.roots.size();
  const int length = cfg.length;
  CMatrix fd_norm(n, n);
  CMatrix fd_lambda(u.size(), n);
  for (std::size_t j = 0; j < n; ++j) {
    auto plus = v.roots;
    auto minus = v.roots;
    plus[j] += kFdStep;
    minus[j] -= kFdStep;
    for (std::size_t k = 0; k < n; ++k)
      fd_norm(k, j) = (residue(side, plus, k, length) - residue(side, minus, k, length)) / (2.0 * kFdStep);
    for (std::size_t k = 0; k < u.size(); ++k)
      fd_lambda(k, j) =
          (lambda_from_roots(side, plus, u[k], length) - lambda_from_roots(side, minus, u[k], length)) / (2.0 * kFdStep);
  }
  const double nrm = max_diff(norm_jacobian(v, side, cfg), fd_norm) / max_abs(fd_norm);
  double gap = 1e300;
  for (const auto& x : u)
    for (const auto& y : v.roots) gap = std::min(gap, std::abs(x - y));
  if (gap < 1e-3) return {-1.0, nrm};
  return {max_diff(lambda_jacobian(u, v, side, cfg), fd_lambda) / max_abs(fd_lambda), nrm};
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  const Beta b101{1.0, 0.0, 1.0};
  const Beta b111{1.0, 1.0, 1.0};
  const Beta b112{1.0, -1.0, 2.0};

  std::vector<Run> sx_runs, sy_runs;
  for (const int length : {2, 4, 6, 8}) {
    sx_runs.push_back(make_run("sx(1,0,1)", Twist::sigma_x(), b101, length));
    sx_runs.push_back(make_run("sx(1,1,1)", Twist::sigma_x(), b111, length));
    sy_runs.push_back(make_run("sy(1,0,1)", Twist::sigma_y(), b101, length));
    sy_runs.push_back(make_run("sy(1,1,1)", Twist::sigma_y(), b111, length));
    sy_runs.push_back(make_run("sy(1,-1,2)", Twist::sigma_y(), b112, length));
  }
  std::vector<const Run*> runs;
  for (const auto& r : sx_runs) runs.push_back(&r);
  for (const auto& r : sy_runs) runs.push_back(&r);

  {
    bool ok = true;
    const std::string d = fcs_line(sx_runs, ok);
    report(1, ok, d);
  }
  {
    bool ok = true;
    const std::string d = fcs_line(sy_runs, ok);
    report(2, ok, d);
  }

  {
    double worst = 0.0;
    for (const Run* r : runs) {
      worst = std::max(worst, std::abs(r->first.values[0] - 1.0));
      worst = std::max(worst, std::abs(r->second.values[0] - 1.0));
    }
    bool exact = true;
    for (const int length : {2, 4, 6, 8}) {
      const auto res = fcs_sum(Twist::sigma_x(), Beta{}, all_ells(length), chain(length));
      for (const Complex v : res.values) exact = exact && v == Complex(1.0);
    }
    report(3, worst <= kSumRule && exact,
           "max |S(0) - 1| " + sci(worst) + " (tol 1e-9); beta = 0 exactly 1: " + (exact ? "yes" : "no"));
  }

  {
    bool ok = true;
    std::size_t checked = 0;
    for (const Run* r : runs) {
      for (const FcsResult* res : {&r->first, &r->second}) {
        ok = ok && res->admissible == (std::size_t{1} << r->length) && res->lines == res->admissible;
        ++checked;
      }
    }
    report(4, ok, std::to_string(checked) + " spectra, admissible = 2^L in each");
  }

  {
    double res_worst = 0.0;
    double tq_worst = 0.0;
    double lam_worst = 0.0;
    for (const Run* r : runs) {
      const ChainConfig cfg = chain(r->length);
      for (const FcsResult* res : {&r->first, &r->second}) {
        auto probe = [&](const SpectralLine& line, const MabaSide& side) {
          res_worst = std::max(res_worst, line.rapidities.residual);
          tq_worst = std::max(tq_worst, line.tq_residual);
          for (const Complex u : kProbes)
            lam_worst = std::max(lam_worst, rel_err(lambda_eigenvalue(u, line.rapidities, side, cfg), line.lambda(u)));
        };
        probe(res->state_line, res->rho.side);
        for (const auto& line : res->spectrum) probe(line, res->rho.tilde);
      }
    }
    report(5, res_worst <= kBetheResidual && tq_worst <= kTq && lam_worst <= kLambda,
           "bethe " + sci(res_worst) + " (1e-10), tq " + sci(tq_worst) + " (1e-8), lambda " + sci(lam_worst) +
               " (1e-8)");
  }

  {
    double ov = 0.0;
    double term = 0.0;
    for (const Run* r : runs) {
      if (r->length > 4) continue;
      const ChainConfig cfg = chain(r->length);
      const FcsResult& res = r->first;
      const RapiditySet& u = res.state_line.rapidities;
      for (const auto& line : res.spectrum) {
        const Complex phi = vacuum_factor_from_reference(line.rapidities, res.rho.tilde, cfg);
        ov = std::max(ov, rel_err(cross_twist_overlap(line.rapidities, u.roots, res.rho, phi, cfg),
                                  bethe_overlap(res.rho.tilde, line.rapidities.roots, res.rho.side, u.roots, cfg)));
      }
      const Complex phi_u = vacuum_factor_from_reference(u, res.rho.side, cfg);
      ov = std::max(ov, rel_err(norm(u, res.rho.side, phi_u, cfg),
                                bethe_overlap(res.rho.side, u.roots, res.rho.side, u.roots, cfg)));
      const auto k_data = transfer_eigen_data(r->k, cfg, false);
      const auto kt_data = transfer_eigen_data(res.twist_tilde, cfg, true);
      const auto oracle = eigenbasis_terms(k_data, res.state_index, kt_data);
      for (const auto& t : res.terms) {
        term = std::max(term, rel_err(t.weight(0), oracle[t.eigen_index].weight));
        term = std::max(term, rel_err(t.ratio(), oracle[t.eigen_index].ratio_base));
      }
    }
    report(6, ov <= kOverlap && term <= kTerm,
           "overlap/norm " + sci(ov) + " (1e-8), term " + sci(term) + " (1e-8) at L = 2, 4");
  }

  {
    double lam = 0.0;
    double nrm = 0.0;
    int sets = 0;
    int lam_sets = 0;
    for (const Run* r : runs) {
      if (r->length != 4 && r->length != 6) continue;
      if (sets >= 20) break;
      const ChainConfig cfg = chain(r->length);
      const FcsResult& res = r->first;
      for (std::size_t i = 0; i < res.spectrum.size() && sets < 20; i += res.spectrum.size() / 2 - 1) {
        const auto [l, n] = jacobian_errors(res.state_line.rapidities.roots, res.spectrum[i].rapidities,
                                            res.rho.tilde, cfg);
        nrm = std::max(nrm, n);
        if (l >= 0.0) {
          lam = std::max(lam, l);
          ++lam_sets;
        }
        ++sets;
      }
    }
    report(7, sets == 20 && lam_sets >= 15 && lam <= kJacobian && nrm <= kJacobian,
           "lambda " + sci(lam) + " over " + std::to_string(lam_sets) + " sets, norm " + sci(nrm) + " over " +
               std::to_string(sets) + " sets (1e-6, step 1e-5)");
  }

  {
    const ChainConfig cfg = chain(4);
    double inv = 0.0;
    double op = 0.0;
    double resid = 0.0;
    for (const Twist& k : {Twist::sigma_x(), Twist::sigma_y()}) {
      for (const Beta& beta : {b101, b111, b112}) {
        for (int ell = 0; ell <= 4; ++ell) inv = std::max(inv, quantum_inverse_residual(k, {beta, ell}, cfg));
        const Twist kt = tilde_twist(k, beta);
        op = std::max(op, transfer_commutator_residual(kt, Complex(0.3, 0.1), Complex(-0.8, 0.5), cfg));
        resid = std::max(resid, resolution_residual(transfer_eigen_data(kt, cfg, true)));
      }
      op = std::max(op, transfer_commutator_residual(k, Complex(0.3, 0.1), Complex(-0.8, 0.5), cfg));
    }
    op = std::max(op, ybe_residual(Complex(0.3, 0.2), Complex(-0.5, 0.7), Complex(1.1, -0.4), cfg));
    op = std::max(op, rtt_residual(Complex(0.3, 0.2), Complex(-0.5, 0.7), cfg));
    report(8, inv <= kInverse && op <= kOperator && resid <= kResolution,
           "inverse " + sci(inv) + " (1e-10), commuting/YBE/RTT " + sci(op) + " (1e-11), identity " + sci(resid) +
               " (1e-9) at L = 4");
  }

  {
    double worst = 0.0;
    double spread = 1e300;  // the two branches must be genuinely different parameter sets
    for (const Run* r : runs) {
      spread = std::min(spread, std::abs(r->second.rho.rho1() - r->first.rho.rho1()));
      for (std::size_t e = 0; e < r->first.values.size(); ++e)
        worst = std::max(worst, rel_err(r->second.values[e], r->first.values[e]));
    }
    report(9, worst <= kBranch && spread > 1e-6,
           "max branch deviation " + sci(worst) + " (1e-9); min |rho1 difference| " + sci(spread));
  }

  {
    const ChainConfig cfg = chain(4);
    double comm = 0.0;
    double fit_res = 0.0;
    std::string consts;
    const Twist other{Complex(0.4, 0.2), Complex(-0.3, 0.1), Complex(1.2, 0.0), Complex(0.7, -0.5)};
    for (const Twist& k : {Twist::sigma_x(), Twist::sigma_y(), other}) {
      const CMatrix h = hamiltonian_logderiv(k, cfg);
      const CMatrix t = transfer_matrix(k, Complex(0.2, 0.3), cfg);
      const CMatrix ht = naive_mul(h, t);
      comm = std::max(comm, max_diff(ht, naive_mul(t, h)) / max_abs(ht));
      const AffineFit fit = fit_affine(h, hamiltonian_boundary(k, cfg));
      fit_res = std::max(fit_res, fit.residual);
      if (consts.empty()) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "alpha = %.12g%+.3gi, delta = %.12g%+.3gi", fit.alpha.real(), fit.alpha.imag(),
                      fit.delta.real(), fit.delta.imag());
        consts = buf;
      }
    }
    report(10, comm <= kHamiltonian && fit_res <= kAffine,
           "[H, t] " + sci(comm) + " (1e-10), affine fit " + sci(fit_res) + " (1e-9) at L = 4; " + consts);
  }

  {
    const Complex s3 = std::sqrt(3.0);
    const Beta dirs[] = {{s3, 0.0, 0.0}, {1.0, 1.0, 1.0}, {0.0, Complex(std::sqrt(2.0)), 1.0}};
    double worst = 0.0;
    for (const int length : {2, 4, 6, 8}) {
      const ChainConfig cfg = chain(length);
      const auto data = transfer_eigen_data(Twist::identity(), cfg, false);
      const std::size_t state = data.select(0);
      for (int ell = 0; ell <= length; ++ell) {
        const Complex ref = fcs_direct(data, state, {dirs[0], ell}, cfg);
        for (const Beta& d : dirs) worst = std::max(worst, rel_err(fcs_direct(data, state, {d, ell}, cfg), ref));
      }
    }
    report(11, worst <= kSu2, "periodic chain, beta.beta = 3 in three directions: " + sci(worst) + " (1e-9)");
  }

  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%d criteria failed; %.1f s\n", failures, elapsed);
  return failures == 0 ? 0 : 1;
}
