#include <algorithm>
#include <cmath>

#include "fcs/numkernel.hpp"

namespace fcs {

CPoly::CPoly(CVector coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) coeffs_.push_back(0.0);
  trim();
}

void CPoly::trim() {
  while (coeffs_.size() > 1 && coeffs_.back() == Complex(0.0)) coeffs_.pop_back();
}

CPoly CPoly::from_roots(std::span<const Complex> roots) {
  CVector c{1.0};
  for (const auto& r : roots) {
    CVector next(c.size() + 1, 0.0);
    for (std::size_t j = 0; j < c.size(); ++j) {
      next[j + 1] += c[j];
      next[j] -= r * c[j];
    }
    c = std::move(next);
  }
  return CPoly(std::move(c));
}

CPoly CPoly::monomial(std::size_t degree, Complex coefficient) {
  CVector c(degree + 1, 0.0);
  c[degree] = coefficient;
  return CPoly(std::move(c));
}

bool CPoly::is_zero() const { return coeffs_.size() == 1 && coeffs_[0] == Complex(0.0); }

bool CPoly::monic(double tol) const { return std::abs(leading() - 1.0) <= tol; }

Complex CPoly::operator()(Complex z) const {
  Complex acc = 0.0;
  for (std::size_t j = coeffs_.size(); j-- > 0;) acc = acc * z + coeffs_[j];
  return acc;
}

CPoly CPoly::derivative() const {
  if (coeffs_.size() == 1) return CPoly();
  CVector d(coeffs_.size() - 1);
  for (std::size_t j = 1; j < coeffs_.size(); ++j) d[j - 1] = static_cast<double>(j) * coeffs_[j];
  return CPoly(std::move(d));
}

CPoly CPoly::shifted(Complex s) const {
  // Horner in polynomial arithmetic: p(u+s) = (...(a_n (u+s) + a_{n-1})(u+s) ...)
  const CPoly lin(CVector{s, 1.0});
  CPoly acc;
  for (std::size_t j = coeffs_.size(); j-- > 0;) acc = acc * lin + CPoly(CVector{coeffs_[j]});
  return acc;
}

CPoly CPoly::monic_normalized() const {
  if (is_zero()) throw Error(ErrorKind::kInvalidArgument, "numkernel", "cannot normalise the zero polynomial");
  return (1.0 / leading()) * *this;
}

double CPoly::max_coeff_abs() const { return max_abs(coeffs_); }

CPoly operator+(const CPoly& a, const CPoly& b) {
  CVector c(std::max(a.coeffs_.size(), b.coeffs_.size()), 0.0);
  for (std::size_t j = 0; j < c.size(); ++j) c[j] = a[j] + b[j];
  return CPoly(std::move(c));
}

CPoly operator-(const CPoly& a, const CPoly& b) {
  CVector c(std::max(a.coeffs_.size(), b.coeffs_.size()), 0.0);
  for (std::size_t j = 0; j < c.size(); ++j) c[j] = a[j] - b[j];
  return CPoly(std::move(c));
}

CPoly operator*(const CPoly& a, const CPoly& b) {
  CVector c(a.coeffs_.size() + b.coeffs_.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
    for (std::size_t j = 0; j < b.coeffs_.size(); ++j) c[i + j] += a.coeffs_[i] * b.coeffs_[j];
  return CPoly(std::move(c));
}

CPoly operator*(Complex s, const CPoly& a) {
  CVector c = a.coeffs_;
  for (auto& x : c) x *= s;
  return CPoly(std::move(c));
}

CPoly poly_from_samples(std::span<const Complex> nodes, std::span<const Complex> values) {
  const std::size_t n = nodes.size();
  if (n == 0 || values.size() != n) {
    throw Error(ErrorKind::kDimension, "numkernel", "interpolation needs matching, non-empty node and value lists");
  }
  CVector dd(values.begin(), values.end());
  for (std::size_t k = 1; k < n; ++k) {
    for (std::size_t i = n - 1; i >= k; --i) {
      const Complex h = nodes[i] - nodes[i - k];
      if (h == Complex(0.0)) throw Error(ErrorKind::kInvalidArgument, "numkernel", "coincident interpolation nodes");
      dd[i] = (dd[i] - dd[i - 1]) / h;
    }
  }
  // Newton form to monomial coefficients
  CPoly p(CVector{dd[n - 1]});
  for (std::size_t k = n - 1; k-- > 0;) p = p * CPoly(CVector{-nodes[k], 1.0}) + CPoly(CVector{dd[k]});
  return p;
}

CVector poly_roots(const CPoly& p) {
  const std::size_t deg = p.degree();
  if (p.is_zero()) throw Error(ErrorKind::kInvalidArgument, "numkernel", "roots of the zero polynomial");
  if (deg == 0) return {};
  const Complex lead = p.leading();
  CMatrix companion(deg, deg);
  for (std::size_t i = 1; i < deg; ++i) companion(i, i - 1) = 1.0;
  for (std::size_t i = 0; i < deg; ++i) companion(i, deg - 1) = -p[i] / lead;
  CVector roots = eigenvalues(companion);

  const CPoly dp = p.derivative();
  const double target = 1e-13 * p.max_coeff_abs();
  for (auto& z : roots) {
    for (int it = 0; it < 40; ++it) {
      const Complex val = p(z);
      if (std::abs(val) <= target) break;
      const Complex der = dp(z);
      if (der == Complex(0.0)) break;
      const Complex next = z - val / der;
      if (std::abs(p(next)) >= std::abs(val)) break;
      z = next;
    }
  }
  return roots;
}

}  // namespace fcs
