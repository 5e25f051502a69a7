#pragma once

// Rational functions of the rapidities and the on-shell quantities built
// from them. Templated on the complex scalar so the same expressions run in
// double and in extended precision.
//
//   f(x, y) = (x - y + c)/(x - y)   g(x, y) = c/(x - y)   h(x, y) = (x - y + c)/c
//   Y(u|w) = (-1)^L (k1 - rho1) a(u) h(w, u) + (k2 - rho2) d(u) h(u, w) + (rho1 + rho2) a(u) d(u)
//   Lambda(v|w) = (k1 - rho1) a(v) f(w, v) + (k2 - rho2) d(v) f(v, w) + (rho1 + rho2) a(v) d(v) g(v, w)
// with set products h(w, u) = prod_i h(w_i, u) etc.

#include <algorithm>
#include <boost/multiprecision/cpp_complex.hpp>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "fcs/numkernel.hpp"

namespace fcs {

// 113-bit mantissa complex, used wherever near-strings cost double precision.
using QuadComplex = boost::multiprecision::cpp_complex_quad;

template <class T>
T to_scalar(Complex z) {
  if constexpr (std::is_same_v<T, Complex>) {
    return z;
  } else {
    return T(z.real(), z.imag());
  }
}

template <class T>
Complex to_complex(const T& z) {
  if constexpr (std::is_same_v<T, Complex>) {
    return z;
  } else {
    return Complex(static_cast<double>(real(z)), static_cast<double>(imag(z)));
  }
}

template <class T>
std::vector<T> to_scalars(std::span<const Complex> xs) {
  std::vector<T> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(to_scalar<T>(x));
  return out;
}

template <class T>
double magnitude(const T& z) {
  using std::abs;
  return static_cast<double>(abs(z));
}

template <class T>
T ipow(T x, int n) {
  T r(1);
  while (n > 0) {
    if (n & 1) r *= x;
    n >>= 1;
    if (n > 0) x *= x;
  }
  return r;
}

// Twist scalars entering the on-shell formulas of one side.
template <class T>
struct SideScalars {
  T k1, k2, rho1, rho2;
};

template <class T>
struct RationalKit {
  T c;
  int length;

  T f(const T& x, const T& y) const { return (x - y + c) / (x - y); }
  T g(const T& x, const T& y) const { return c / (x - y); }
  T h(const T& x, const T& y) const { return (x - y + c) / c; }
  T t(const T& x, const T& y) const { return g(x, y) * g(x, y) / f(x, y); }

  T a(const T& u) const { return ipow((u + c) / c, length); }
  T d(const T& u) const { return ipow(u / c, length); }
  // c a'(u), c d'(u)
  T a_prime(const T& u) const { return T(length) * ipow((u + c) / c, length - 1); }
  T d_prime(const T& u) const { return T(length) * ipow(u / c, length - 1); }

  // prod_{i > j} g(x_i, x_j)
  T delta(std::span<const T> xs) const {
    T p(1);
    for (std::size_t i = 0; i < xs.size(); ++i)
      for (std::size_t j = 0; j < i; ++j) p *= g(xs[i], xs[j]);
    return p;
  }
  // prod_{i < j} g(x_i, x_j)
  T delta_prime(std::span<const T> xs) const {
    T p(1);
    for (std::size_t i = 0; i < xs.size(); ++i)
      for (std::size_t j = i + 1; j < xs.size(); ++j) p *= g(xs[i], xs[j]);
    return p;
  }
  T g_set(std::span<const T> xs, std::span<const T> ys) const {
    T p(1);
    for (const auto& x : xs)
      for (const auto& y : ys) p *= g(x, y);
    return p;
  }
  T d_set(std::span<const T> xs) const {
    T p(1);
    for (const auto& x : xs) p *= d(x);
    return p;
  }
};

template <class T>
struct YTerms {
  T first, second, third;
  T sum() const { return first + second + third; }
  double largest() const { return std::max({magnitude(first), magnitude(second), magnitude(third)}); }
};

// Terms of Y(u | roots without index skip); skip = roots.size() keeps all.
template <class T>
YTerms<T> y_terms(const RationalKit<T>& kit, const SideScalars<T>& s, const T& u, std::span<const T> roots,
                  std::size_t skip) {
  T ha(1), hd(1);
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (i == skip) continue;
    ha *= kit.h(roots[i], u);
    hd *= kit.h(u, roots[i]);
  }
  const T au = kit.a(u);
  const T du = kit.d(u);
  const T sign = (kit.length % 2 == 0) ? T(1) : T(-1);
  return {sign * (s.k1 - s.rho1) * au * ha, (s.k2 - s.rho2) * du * hd, (s.rho1 + s.rho2) * au * du};
}

// Bethe functions Phi_k = Y(u_k | roots without u_k).
template <class T>
std::vector<T> bethe_functions(const RationalKit<T>& kit, const SideScalars<T>& s, std::span<const T> roots) {
  std::vector<T> out(roots.size());
  for (std::size_t k = 0; k < roots.size(); ++k) out[k] = y_terms(kit, s, roots[k], roots, k).sum();
  return out;
}

// Per-equation |Phi_k| / (largest of its three terms).
template <class T>
std::vector<double> normalized_bethe_residuals(const RationalKit<T>& kit, const SideScalars<T>& s,
                                               std::span<const T> roots) {
  std::vector<double> out(roots.size());
  for (std::size_t k = 0; k < roots.size(); ++k) {
    const auto terms = y_terms(kit, s, roots[k], roots, k);
    const double scale = std::max(terms.largest(), 1e-300);
    out[k] = magnitude(terms.sum()) / scale;
  }
  return out;
}

// G_kj = c dPhi_k/du_j (total derivative, u_k appears in every factor).
template <class T>
BasicMatrix<T> gaudin_matrix(const RationalKit<T>& kit, const SideScalars<T>& s, std::span<const T> roots) {
  const std::size_t n = roots.size();
  const T sign = (kit.length % 2 == 0) ? T(1) : T(-1);
  const T ca = sign * (s.k1 - s.rho1);
  const T cd = s.k2 - s.rho2;
  const T ci = s.rho1 + s.rho2;
  BasicMatrix<T> g(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const T& uk = roots[k];
    const T ak = kit.a(uk);
    const T dk = kit.d(uk);
    // products over i != k, j
    auto prod_a = [&](std::size_t j) {
      T p(1);
      for (std::size_t i = 0; i < n; ++i)
        if (i != k && i != j) p *= kit.h(roots[i], uk);
      return p;
    };
    auto prod_d = [&](std::size_t j) {
      T p(1);
      for (std::size_t i = 0; i < n; ++i)
        if (i != k && i != j) p *= kit.h(uk, roots[i]);
      return p;
    };
    T diag = ci * (kit.a_prime(uk) * dk + ak * kit.d_prime(uk));
    diag += ca * kit.a_prime(uk) * prod_a(k);
    diag += cd * kit.d_prime(uk) * prod_d(k);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == k) continue;
      const T pa = prod_a(j);
      const T pd = prod_d(j);
      // dh(u_j, u_k)/du_j = 1/c, dh(u_j, u_k)/du_k = -1/c
      g(k, j) = ca * ak * pa - cd * dk * pd;
      diag += -ca * ak * pa + cd * dk * pd;
    }
    g(k, k) = diag;
  }
  return g;
}

template <class T>
T lambda_value(const RationalKit<T>& kit, const SideScalars<T>& s, const T& v, std::span<const T> roots) {
  T fa(1), fd(1), gg(1);
  for (const auto& u : roots) {
    fa *= kit.f(u, v);
    fd *= kit.f(v, u);
    gg *= kit.g(v, u);
  }
  const T av = kit.a(v);
  const T dv = kit.d(v);
  return (s.k1 - s.rho1) * av * fa + (s.k2 - s.rho2) * dv * fd + (s.rho1 + s.rho2) * av * dv * gg;
}

// Lambda(0 | roots): d(0) = 0 leaves only the first term.
template <class T>
T lambda_at_zero(const RationalKit<T>& kit, const SideScalars<T>& s, std::span<const T> roots) {
  T p(1);
  const T zero(0);
  for (const auto& u : roots) p *= kit.f(u, zero);
  return (s.k1 - s.rho1) * p;
}

// J_kj = c dLambda(v_k | u)/du_j.
template <class T>
BasicMatrix<T> lambda_jacobian(const RationalKit<T>& kit, const SideScalars<T>& s, std::span<const T> v,
                               std::span<const T> u) {
  const std::size_t n = u.size();
  BasicMatrix<T> jac(v.size(), n);
  for (std::size_t k = 0; k < v.size(); ++k) {
    const T& vk = v[k];
    const T av = kit.a(vk);
    const T dv = kit.d(vk);
    T gall(1);
    for (const auto& x : u) gall *= kit.g(vk, x);
    for (std::size_t j = 0; j < n; ++j) {
      T pa(1), pd(1);
      for (std::size_t i = 0; i < n; ++i) {
        if (i == j) continue;
        pa *= kit.f(u[i], vk);
        pd *= kit.f(vk, u[i]);
      }
      const T gjv = kit.g(u[j], vk);
      const T gvj = kit.g(vk, u[j]);
      jac(k, j) = -(s.k1 - s.rho1) * av * gjv * gjv * pa + (s.k2 - s.rho2) * dv * gvj * gvj * pd +
                  (s.rho1 + s.rho2) * av * dv * gall * gvj;
    }
  }
  return jac;
}

template <class T>
struct NewtonOutcome {
  std::vector<T> roots;
  double residual = 0.0;  // max normalized Bethe residual
  int iterations = 0;
  bool singular = false;
  std::vector<double> history;  // residual after each accepted step, starting with the input
};

// Damped Newton on Phi(roots) = 0 with the analytic Gaudin matrix; a step is
// halved (at most 8 times) while the residual grows.
template <class T>
NewtonOutcome<T> newton_solve(const RationalKit<T>& kit, const SideScalars<T>& s, std::vector<T> roots,
                              double target, int max_iter) {
  auto residual_of = [&](std::span<const T> r) {
    const auto res = normalized_bethe_residuals(kit, s, r);
    return res.empty() ? 0.0 : *std::max_element(res.begin(), res.end());
  };
  NewtonOutcome<T> out;
  double res = residual_of(roots);
  out.history.push_back(res);
  for (int it = 0; it < max_iter && res > target; ++it) {
    const auto phi = bethe_functions(kit, s, std::span<const T>(roots));
    const auto gm = gaudin_matrix(kit, s, std::span<const T>(roots));
    std::vector<T> step;
    try {
      step = lu_solve(gm, std::span<const T>(phi), 1e-300);
    } catch (const Error&) {
      out.singular = true;
      break;
    }
    T scale(1);
    bool accepted = false;
    std::vector<T> trial(roots.size());
    double trial_res = res;
    for (int halving = 0; halving <= 8; ++halving) {
      for (std::size_t i = 0; i < roots.size(); ++i) trial[i] = roots[i] - scale * kit.c * step[i];
      trial_res = residual_of(trial);
      if (std::isfinite(trial_res) && trial_res < res) {
        accepted = true;
        break;
      }
      scale /= T(2);
    }
    if (!accepted) break;
    roots = trial;
    res = trial_res;
    out.history.push_back(res);
    out.iterations = it + 1;
  }
  out.roots = std::move(roots);
  out.residual = res;
  return out;
}

}  // namespace fcs
