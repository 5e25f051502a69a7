#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fcs/twist.hpp"
#include "support.hpp"

using namespace fcs;
using namespace fcs::testing;

namespace {

CMatrix q_matrix(const Beta& b) {
  CMatrix q = b[0] * sx();
  q += b[1] * sy();
  q += b[2] * sz();
  return q;
}

// (rho1 - k1)(rho2 - k2) = gamma, written out independently
Complex constraint(const Twist& k, Complex r1, Complex r2) {
  return (r1 - k.k1) * (r2 - k.k2) - (k.k1 * k.k2 - k.kp * k.km);
}

Twist random_generic_twist() { return {random_complex(), random_complex(), random_complex() + 1.5, random_complex() - 1.5}; }

}  // namespace

TEST_CASE("counting-shifted twist against the Taylor exponential") {
  for (int trial = 0; trial < 4; ++trial) {
    const Twist k = random_generic_twist();
    const Beta beta{random_complex(), random_complex(), random_complex()};
    const CMatrix want = naive_mul(k.matrix(), taylor_expm(-1.0 * q_matrix(beta)));
    CHECK(max_diff(tilde_twist(k, beta).matrix(), want) < 1e-12);
  }
  const Twist x = Twist::sigma_x();
  CHECK(max_diff(tilde_twist(x, Beta{}).matrix(), x.matrix()) == 0.0);
  // determinant is preserved: det exp(-Q) = 1
  const Twist k = random_generic_twist();
  const Twist kt = tilde_twist(k, Beta{Complex(0.3, 0.1), Complex(-0.4), Complex(0.9, -0.2)});
  CHECK(rel_err(kt.gamma(), k.gamma()) < 1e-13);
}

TEST_CASE("linked rho-parameters satisfy both constraints") {
  const Twist twists[] = {Twist::sigma_x(), Twist::sigma_y(), random_generic_twist()};
  const Beta betas[] = {{1.0, 0.0, 1.0}, {1.0, 1.0, 1.0}, {1.0, -1.0, 2.0}, {Complex(0.2, 0.3), 0.5, -0.7}};
  for (const Twist& k : twists) {
    for (const Beta& beta : betas) {
      const Twist kt = tilde_twist(k, beta);
      if (!kt.generic()) continue;
      const auto branches = solve_rho_link(k, kt);
      REQUIRE(!branches.empty());
      CHECK(branches.size() <= 2);
      for (std::size_t b = 0; b < branches.size(); ++b) {
        const RhoData& d = branches[b];
        CHECK(d.branch_id == static_cast<int>(b));
        const double scale = 1.0 + std::abs(d.rho1() * d.rho2());
        CHECK(std::abs(constraint(k, d.rho1(), d.rho2())) < 1e-12 * scale);
        const double tscale = 1.0 + std::abs(d.rho1_tilde() * d.rho2_tilde());
        CHECK(std::abs(constraint(kt, d.rho1_tilde(), d.rho2_tilde())) < 1e-12 * tscale);
        CHECK(std::abs(d.rho1_tilde() * k.km - d.rho1() * kt.km) < 1e-12 * (1.0 + std::abs(d.rho1())));
        CHECK(std::abs(d.rho2_tilde() * k.km - d.rho2() * kt.km) < 1e-12 * (1.0 + std::abs(d.rho2())));
        CHECK(rel_err(d.mu(), 1.0 / (1.0 - d.rho1() * d.rho2() / (k.kp * k.km))) < 1e-14);
        CHECK(rel_err(d.mu_tilde(), 1.0 / (1.0 - d.rho1_tilde() * d.rho2_tilde() / (kt.kp * kt.km))) < 1e-14);
      }
      if (branches.size() == 2) {
        const Complex a = branches[0].rho1();
        const Complex b = branches[1].rho1();
        CHECK((a.real() < b.real() || (a.real() == b.real() && a.imag() <= b.imag())));
      }
    }
  }
}

TEST_CASE("zero counting parameter gives two self-linked branches") {
  const Twist k = Twist::sigma_x();
  const auto branches = solve_rho_link(k, tilde_twist(k, Beta{}));
  REQUIRE(branches.size() == 2);
  for (const auto& d : branches) {
    CHECK(d.rho1() == d.rho2());
    CHECK(std::abs(d.rho1() * d.rho1() + 1.0) < 1e-14);
    CHECK(d.rho1_tilde() == d.rho1());
  }
}

TEST_CASE("pure z counting on the sigma^x twist has no linked solution") {
  const Twist k = Twist::sigma_x();
  CHECK_THROWS_AS(solve_rho_link(k, tilde_twist(k, Beta{0.0, 0.0, 0.8})), Error);
  try {
    solve_rho_link(k, tilde_twist(k, Beta{0.0, 0.0, 0.8}));
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kLinkingUnsolvable);
  }
}

TEST_CASE("B D A factorisation reproduces the twist") {
  for (int trial = 0; trial < 5; ++trial) {
    const Twist k = random_generic_twist();
    const Complex r1 = random_complex() + 2.0;
    // second parameter from the constraint
    const Complex r2 = k.k2 + (k.k1 * k.k2 - k.kp * k.km) / (r1 - k.k1);
    REQUIRE(std::abs(constraint(k, r1, r2)) < 1e-12);
    const BdaFactors f = decompose_bda(k, r1, r2);
    CHECK(max_diff(naive_mul(naive_mul(f.b, f.d), f.a), k.matrix()) < 1e-12);
    CHECK(constraint_residual(k, r1, r2) < 1e-14);
  }
  CHECK(constraint_residual(Twist::sigma_x(), 2.0, 0.5) > 0.1);
}

TEST_CASE("modified-construction sides reject degenerate input") {
  CHECK_THROWS_AS(make_side(Twist::identity(), 0.5, 0.5), Error);
  CHECK_THROWS_AS(make_side(Twist{1.0, 1.0, 1.0, 0.0}, 0.5, 0.5), Error);
  // mu pole: rho1 rho2 = kp km
  CHECK_THROWS_AS(make_side(Twist::sigma_x(), 2.0, 0.5), Error);
  const MabaSide s = make_side(Twist::sigma_x(), 2.0, -0.5);
  CHECK(std::abs(s.mu - 0.5) < 1e-15);
  CHECK_THROWS_AS(solve_rho_link(Twist::identity(), Twist::sigma_x()), Error);
}
