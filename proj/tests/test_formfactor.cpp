#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "fcs/formfactor.hpp"
#include "support.hpp"

using namespace fcs;
using namespace fcs::testing;

namespace {

ChainConfig chain(int length) {
  ChainConfig cfg;
  cfg.length = length;
  return cfg;
}

Complex q_at(std::span<const Complex> roots, Complex u) {
  Complex q = 1.0;
  for (const Complex r : roots) q *= u - r;
  return q;
}

// c = 1 throughout: eigenvalue and residue functions written from Q directly.
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

double rel_matrix(const CMatrix& got, const CMatrix& want) { return max_diff(got, want) / max_abs(want); }

const Beta kBeta{1.0, 0.0, 1.0};

}  // namespace

TEST_CASE("overlaps and norms against the operator oracle") {
  for (const int length : {2, 4}) {
    const ChainConfig cfg = chain(length);
    for (const Twist& k : {Twist::sigma_x(), Twist::sigma_y()}) {
      const std::vector<int> ells{0};
      const FcsResult res = fcs_sum(k, Beta{1.0, 1.0, 1.0}, ells, cfg);
      const RhoData& rho = res.rho;
      const RapiditySet& u = res.state_line.rapidities;
      for (const auto& line : res.spectrum) {
        const RapiditySet& v = line.rapidities;
        const Complex phi = vacuum_factor_from_reference(v, rho.tilde, cfg);
        const Complex ours = cross_twist_overlap(v, u.roots, rho, phi, cfg);
        CHECK(rel_err(ours, bethe_overlap(rho.tilde, v.roots, rho.side, u.roots, cfg)) <= 1e-8);
        // same-twist product with an arbitrary off-shell set
        const std::vector<Complex> off{Complex(0.21, 0.4), Complex(-0.5, 0.13), Complex(0.9, -0.2),
                                       Complex(-1.1, -0.6)};
        const std::span<const Complex> w(off.data(), static_cast<std::size_t>(length));
        CHECK(rel_err(slavnov_overlap(v, w, rho.tilde, phi, cfg), bethe_overlap(rho.tilde, v.roots, rho.tilde, w, cfg)) <=
              1e-8);
      }
      const Complex phi_u = vacuum_factor_from_reference(u, rho.side, cfg);
      CHECK(rel_err(norm(u, rho.side, phi_u, cfg), bethe_overlap(rho.side, u.roots, rho.side, u.roots, cfg)) <= 1e-8);
    }
  }
}

TEST_CASE("form-factor terms equal the eigenbasis summands") {
  for (const int length : {2, 4}) {
    const ChainConfig cfg = chain(length);
    const Twist k = Twist::sigma_y();
    const Beta beta{1.0, -1.0, 2.0};
    const std::vector<int> ells{0, 1};
    const FcsResult res = fcs_sum(k, beta, ells, cfg);
    const auto k_data = transfer_eigen_data(k, cfg, false);
    const auto kt_data = transfer_eigen_data(tilde_twist(k, beta), cfg, true);
    const auto oracle = eigenbasis_terms(k_data, res.state_index, kt_data);
    REQUIRE(res.terms.size() == cfg.dimension());
    for (const auto& t : res.terms) {
      CHECK(rel_err(t.weight(0), oracle[t.eigen_index].weight) <= 1e-8);
      CHECK(rel_err(t.ratio(), oracle[t.eigen_index].ratio_base) <= 1e-8);
      CHECK(rel_err(t.weight(3), oracle[t.eigen_index].weight * std::pow(oracle[t.eigen_index].ratio_base, 3)) <=
            1e-8);
    }
  }
}

TEST_CASE("Jacobians against central differences") {
  const ChainConfig cfg = chain(4);
  const std::vector<int> ells{0};
  const FcsResult res = fcs_sum(Twist::sigma_x(), kBeta, ells, cfg);
  const MabaSide& side = res.rho.tilde;
  const auto& u = res.state_line.rapidities.roots;
  const double h = 1e-5;
  int used = 0;
  for (const auto& line : res.spectrum) {
    const RapiditySet& v = line.rapidities;
    const std::size_t n = v.roots.size();
    CMatrix fd_norm(n, n);
    CMatrix fd_lambda(u.size(), n);
    for (std::size_t j = 0; j < n; ++j) {
      auto plus = v.roots;
      auto minus = v.roots;
      plus[j] += h;
      minus[j] -= h;
      for (std::size_t k = 0; k < n; ++k)
        fd_norm(k, j) = (residue(side, plus, k, 4) - residue(side, minus, k, 4)) / (2.0 * h);
      for (std::size_t k = 0; k < u.size(); ++k)
        fd_lambda(k, j) = (lambda_from_roots(side, plus, u[k], 4) - lambda_from_roots(side, minus, u[k], 4)) / (2.0 * h);
    }
    CHECK(rel_matrix(norm_jacobian(v, side, cfg), fd_norm) <= 1e-6);
    double gap = 1e300;
    for (const auto& x : u)
      for (const auto& y : v.roots) gap = std::min(gap, std::abs(x - y));
    if (gap < 1e-3) continue;
    CHECK(rel_matrix(lambda_jacobian(u, v, side, cfg), fd_lambda) <= 1e-6);
    ++used;
  }
  CHECK(used >= 10);
  const RapiditySet& v0 = res.spectrum.front().rapidities;
  CHECK_THROWS_AS(lambda_jacobian(v0.roots, v0, side, cfg), Error);
}

TEST_CASE("eigenvalue function of an on-shell set") {
  const ChainConfig cfg = chain(4);
  const std::vector<int> ells{0};
  const FcsResult res = fcs_sum(Twist::sigma_x(), kBeta, ells, cfg);
  for (const auto& line : res.spectrum) {
    const RapiditySet& v = line.rapidities;
    CHECK(rel_err(lambda_at_zero(v, res.rho.tilde, cfg), line.lambda(0.0)) <= 1e-9);
    for (const Complex z : {Complex(0.4, -0.3), Complex(-1.2, 0.7)})
      CHECK(rel_err(lambda_eigenvalue(z, v, res.rho.tilde, cfg), line.lambda(z)) <= 1e-9);
    // at a rapidity, where the three-term form is 0/0
    CHECK(rel_err(lambda_eigenvalue(v.roots[0], v, res.rho.tilde, cfg), line.lambda(v.roots[0])) <= 1e-8);
  }
}

TEST_CASE("form-factor sum against direct evaluation") {
  struct Case {
    Twist k;
    Beta beta;
  };
  const Case cases[] = {{Twist::sigma_x(), {1.0, 0.0, 1.0}},
                        {Twist::sigma_x(), {1.0, 1.0, 1.0}},
                        {Twist::sigma_y(), {1.0, -1.0, 2.0}}};
  for (const int length : {2, 4, 6}) {
    const ChainConfig cfg = chain(length);
    std::vector<int> ells(static_cast<std::size_t>(length) + 1);
    std::iota(ells.begin(), ells.end(), 0);
    for (const Case& c : cases) {
      FcsOptions opt;
      opt.with_oracle = true;
      const FcsResult res = fcs_sum(c.k, c.beta, ells, cfg, opt);
      const auto direct = fcs_oracle(c.k, c.beta, ells, cfg, 0);
      REQUIRE(res.oracle.size() == ells.size());
      CHECK(res.admissible == cfg.dimension());
      CHECK(res.excluded.empty());
      for (std::size_t e = 0; e < ells.size(); ++e) {
        CHECK(rel_err(res.values[e], direct[e]) <= 1e-8);
        CHECK(res.oracle[e] == direct[e]);
      }
      CHECK(std::abs(res.values[0] - 1.0) <= 1e-9);
    }
  }
}

TEST_CASE("excited states and both branches") {
  const ChainConfig cfg = chain(4);
  const std::vector<int> ells{0, 2, 4};
  for (const std::size_t state : {std::size_t{1}, std::size_t{7}}) {
    FcsOptions opt;
    opt.state = state;
    const FcsResult r0 = fcs_sum(Twist::sigma_y(), Beta{1.0, 1.0, 1.0}, ells, cfg, opt);
    opt.branch = 1;
    const FcsResult r1 = fcs_sum(Twist::sigma_y(), Beta{1.0, 1.0, 1.0}, ells, cfg, opt);
    CHECK(r0.branch_count == 2);
    const auto direct = fcs_oracle(Twist::sigma_y(), Beta{1.0, 1.0, 1.0}, ells, cfg, state);
    for (std::size_t e = 0; e < ells.size(); ++e) {
      CHECK(rel_err(r0.values[e], direct[e]) <= 1e-8);
      CHECK(std::abs(r0.values[e] - r1.values[e]) <= 1e-9 * std::max(1.0, std::abs(r0.values[e])));
    }
  }
  FcsOptions bad;
  bad.branch = 2;
  CHECK_THROWS_AS(fcs_sum(Twist::sigma_x(), kBeta, ells, cfg, bad), Error);
}

TEST_CASE("zero counting parameter is exactly one") {
  const ChainConfig cfg = chain(4);
  const std::vector<int> ells{0, 1, 2, 3, 4};
  const FcsResult res = fcs_sum(Twist::sigma_x(), Beta{}, ells, cfg);
  CHECK(res.trivial);
  for (const Complex v : res.values) CHECK(v == Complex(1.0));
}

TEST_CASE("serial and parallel sums agree") {
  const ChainConfig cfg = chain(4);
  const std::vector<int> ells{1, 3};
  FcsOptions opt;
  opt.parallel = false;
  const FcsResult a = fcs_sum(Twist::sigma_x(), Beta{1.0, 1.0, 1.0}, ells, cfg, opt);
  opt.parallel = true;
  const FcsResult b = fcs_sum(Twist::sigma_x(), Beta{1.0, 1.0, 1.0}, ells, cfg, opt);
  for (std::size_t e = 0; e < ells.size(); ++e) CHECK(a.values[e] == b.values[e]);
}
