#include "fcs/twist.hpp"

#include <algorithm>
#include <cmath>

namespace fcs {

namespace {

constexpr double kConstraintTol = 1e-12;

// Both roots of a2 x^2 + a1 x + a0, numerically stable.
std::vector<Complex> quadratic_roots(Complex a2, Complex a1, Complex a0) {
  const Complex disc = std::sqrt(a1 * a1 - 4.0 * a2 * a0);
  // pick the sign avoiding cancellation
  const Complex q = -0.5 * (a1 + ((std::conj(a1) * disc).real() >= 0.0 ? disc : -disc));
  std::vector<Complex> roots;
  if (q != Complex(0.0)) {
    roots.push_back(q / a2);
    roots.push_back(a0 / q);
  } else {
    roots.assign(2, Complex(0.0));
  }
  return roots;
}

bool lex_less(Complex a, Complex b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

}  // namespace

Twist Twist::from_matrix(const CMatrix& m) {
  if (m.rows() != 2 || m.cols() != 2) throw Error(ErrorKind::kDimension, "twist_engine", "twist must be 2x2");
  return {m(0, 0), m(1, 1), m(0, 1), m(1, 0)};
}

CMatrix Twist::matrix() const {
  CMatrix m(2, 2);
  m(0, 0) = k1;
  m(0, 1) = kp;
  m(1, 0) = km;
  m(1, 1) = k2;
  return m;
}

double Twist::max_abs() const { return std::max({std::abs(k1), std::abs(k2), std::abs(kp), std::abs(km)}); }

Twist tilde_twist(const Twist& k, const Beta& beta) {
  return Twist::from_matrix(k.matrix() * mat_exp_pauli(beta, -1));
}

MabaSide make_side(const Twist& k, Complex rho1, Complex rho2) {
  if (!k.generic()) {
    throw Error(ErrorKind::kNonGeneric, "twist_engine", "modified construction needs nonzero off-diagonal twist entries");
  }
  const Complex p = k.kp * k.km;
  const Complex denom = 1.0 - rho1 * rho2 / p;
  if (std::abs(denom) <= 1e-12) {
    throw Error(ErrorKind::kNonGeneric, "twist_engine", "mu is singular (rho1 rho2 = kp km)");
  }
  return {k, rho1, rho2, 1.0 / denom};
}

double constraint_residual(const Twist& k, Complex rho1, Complex rho2) {
  const Complex value = rho1 * rho2 - (k.k2 * rho1 + k.k1 * rho2) + k.kp * k.km;
  const double scale = std::max({1.0, std::abs(rho1 * rho2), std::abs(k.k2 * rho1), std::abs(k.k1 * rho2),
                                 std::abs(k.kp * k.km)});
  return std::abs(value) / scale;
}

std::vector<RhoData> solve_rho_link(const Twist& k, const Twist& kt) {
  if (!k.generic() || !kt.generic()) {
    throw Error(ErrorKind::kNonGeneric, "twist_engine", "linking needs nonzero off-diagonal entries in both twists");
  }
  const Complex lam = kt.km / k.km;
  const Complex p = k.kp * k.km;
  const Complex pt = kt.kp * kt.km;
  const Complex a2 = lam * lam * k.k2 - lam * kt.k2;
  const Complex a1 = -lam * lam * p + lam * kt.k2 * k.k1 - lam * kt.k1 * k.k2 + pt;
  const Complex a0 = lam * kt.k1 * p - pt * k.k1;
  const double scale = std::max({1.0, k.max_abs() * k.max_abs(), kt.max_abs() * kt.max_abs()}) *
                       std::max(1.0, std::abs(lam) * std::abs(lam));
  const double zero = 1e-14 * scale;

  std::vector<Complex> candidates;
  const bool vanishes = std::abs(a2) <= zero && std::abs(a1) <= zero && std::abs(a0) <= zero;
  if (vanishes) {
    // identical twists: every constraint point links to itself; take the
    // symmetric points rho1 = rho2
    candidates = quadratic_roots(1.0, -(k.k1 + k.k2), p);
  } else if (std::abs(a2) <= zero) {
    if (std::abs(a1) <= zero) {
      throw Error(ErrorKind::kLinkingUnsolvable, "twist_engine",
                  "linking constraints are inconsistent for this twist pair; perturb beta");
    }
    candidates.push_back(-a0 / a1);
  } else {
    candidates = quadratic_roots(a2, a1, a0);
  }
  std::sort(candidates.begin(), candidates.end(), lex_less);

  std::vector<RhoData> out;
  for (const Complex r1 : candidates) {
    const Complex gap = r1 - k.k1;
    if (std::abs(gap) <= 1e-12 * std::max(1.0, std::abs(k.k1))) continue;
    const Complex r2 = vanishes ? r1 : (k.k2 * r1 - p) / gap;
    try {
      RhoData data;
      data.side = make_side(k, r1, r2);
      data.tilde = make_side(kt, lam * r1, lam * r2);
      if (constraint_residual(k, r1, r2) > kConstraintTol ||
          constraint_residual(kt, data.tilde.rho1, data.tilde.rho2) > kConstraintTol) {
        continue;
      }
      data.branch_id = static_cast<int>(out.size());
      out.push_back(data);
    } catch (const Error&) {
      // mu pole on this branch
    }
  }
  if (out.empty()) {
    throw Error(ErrorKind::kLinkingUnsolvable, "twist_engine",
                "no admissible branch of the linking constraints for this twist pair; perturb beta");
  }
  return out;
}

BdaFactors decompose_bda(const Twist& k, Complex rho1, Complex rho2) {
  const MabaSide s = make_side(k, rho1, rho2);
  const Complex root = std::sqrt(s.mu);
  BdaFactors f;
  f.mu = s.mu;
  f.a = CMatrix(2, 2);
  f.a(0, 0) = root;
  f.a(0, 1) = root * rho2 / k.km;
  f.a(1, 0) = root * rho1 / k.kp;
  f.a(1, 1) = root;
  f.b = CMatrix(2, 2);
  f.b(0, 0) = root;
  f.b(0, 1) = root * rho1 / k.km;
  f.b(1, 0) = root * rho2 / k.kp;
  f.b(1, 1) = root;
  f.d = CMatrix(2, 2);
  f.d(0, 0) = k.k1 - rho1;
  f.d(1, 1) = k.k2 - rho2;
  return f;
}

}  // namespace fcs
