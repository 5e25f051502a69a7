#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fcs/numkernel.hpp"

namespace fcs {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double norm1(Complex z) { return std::abs(z.real()) + std::abs(z.imag()); }

// Unitary G = [[c, s], [-conj(s), c]] with G [x; y] = [*; 0].
struct Givens {
  double c = 1.0;
  Complex s = 0.0;

  static Givens make(Complex x, Complex y) {
    Givens g;
    const double ax = std::abs(x);
    const double ay = std::abs(y);
    if (ay == 0.0) return g;
    if (ax == 0.0) {
      g.c = 0.0;
      g.s = std::conj(y) / ay;
      return g;
    }
    const double nrm = std::hypot(ax, ay);
    g.c = ax / nrm;
    g.s = (x / ax) * std::conj(y) / nrm;
    return g;
  }

  // rows p, p+1 of m, columns [from, to)
  void apply_left(CMatrix& m, std::size_t p, std::size_t from, std::size_t to) const {
    for (std::size_t j = from; j < to; ++j) {
      const Complex a = m(p, j);
      const Complex b = m(p + 1, j);
      m(p, j) = c * a + s * b;
      m(p + 1, j) = -std::conj(s) * a + c * b;
    }
  }

  // columns p, p+1 of m times G^H, rows [from, to)
  void apply_right_adjoint(CMatrix& m, std::size_t p, std::size_t from, std::size_t to) const {
    for (std::size_t i = from; i < to; ++i) {
      const Complex a = m(i, p);
      const Complex b = m(i, p + 1);
      m(i, p) = c * a + std::conj(s) * b;
      m(i, p + 1) = -s * a + c * b;
    }
  }
};

// In-place reduction to upper Hessenberg form, H = Q^H M Q.
void hessenberg(CMatrix& h, CMatrix* q) {
  const std::size_t n = h.rows();
  if (n < 3) return;
  CVector v(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    double xnorm2 = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) xnorm2 += std::norm(h(i, k));
    const double xnorm = std::sqrt(xnorm2);
    double tail2 = xnorm2 - std::norm(h(k + 1, k));
    if (xnorm == 0.0 || tail2 <= 0.0) continue;
    const Complex x0 = h(k + 1, k);
    const Complex phase = std::abs(x0) > 0 ? x0 / std::abs(x0) : Complex(1.0);
    std::fill(v.begin(), v.end(), Complex(0.0));
    for (std::size_t i = k + 1; i < n; ++i) v[i] = h(i, k);
    v[k + 1] += phase * xnorm;
    double vnorm2 = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) vnorm2 += std::norm(v[i]);
    const double scale = 2.0 / vnorm2;
    // h <- P h
    for (std::size_t j = k; j < n; ++j) {
      Complex s = 0.0;
      for (std::size_t i = k + 1; i < n; ++i) s += std::conj(v[i]) * h(i, j);
      s *= scale;
      for (std::size_t i = k + 1; i < n; ++i) h(i, j) -= v[i] * s;
    }
    // h <- h P
    for (std::size_t i = 0; i < n; ++i) {
      Complex s = 0.0;
      for (std::size_t j = k + 1; j < n; ++j) s += h(i, j) * v[j];
      s *= scale;
      for (std::size_t j = k + 1; j < n; ++j) h(i, j) -= s * std::conj(v[j]);
    }
    if (q != nullptr) {
      for (std::size_t i = 0; i < n; ++i) {
        Complex s = 0.0;
        for (std::size_t j = k + 1; j < n; ++j) s += (*q)(i, j) * v[j];
        s *= scale;
        for (std::size_t j = k + 1; j < n; ++j) (*q)(i, j) -= s * std::conj(v[j]);
      }
    }
    for (std::size_t i = k + 2; i < n; ++i) h(i, k) = 0.0;
  }
}

Complex wilkinson_shift(const CMatrix& t, std::size_t iu, int iter) {
  if (iter == 10 || iter == 20) {
    const double extra = iu >= 2 ? std::abs(t(iu - 1, iu - 2).real()) : 0.0;
    return std::abs(t(iu, iu - 1).real()) + extra;
  }
  Complex t00 = t(iu - 1, iu - 1);
  Complex t01 = t(iu - 1, iu);
  Complex t10 = t(iu, iu - 1);
  Complex t11 = t(iu, iu);
  const double normt = std::abs(t00) + std::abs(t01) + std::abs(t10) + std::abs(t11);
  if (normt == 0.0) return 0.0;
  t00 /= normt;
  t01 /= normt;
  t10 /= normt;
  t11 /= normt;
  const Complex b = t01 * t10;
  const Complex c = t00 - t11;
  const Complex disc = std::sqrt(c * c + 4.0 * b);
  const Complex det = t00 * t11 - b;
  const Complex trace = t00 + t11;
  Complex e1 = (trace + disc) / 2.0;
  Complex e2 = (trace - disc) / 2.0;
  const double n1 = norm1(e1);
  const double n2 = norm1(e2);
  if (n1 > n2) {
    e2 = det / e1;
  } else if (n2 != 0.0) {
    e1 = det / e2;
  }
  return normt * (norm1(e1 - t11) < norm1(e2 - t11) ? e1 : e2);
}

// Shifted QR on a Hessenberg matrix until upper triangular; Z accumulates
// the rotations when given.
void schur_triangularize(CMatrix& t, CMatrix* z) {
  const std::size_t n = t.rows();
  if (n < 2) return;
  const std::size_t max_iter = 30 * n;
  std::size_t iu = n - 1;
  int iter = 0;
  std::size_t total = 0;
  auto negligible = [&](std::size_t i) {
    const double tol = kEps * (norm1(t(i, i)) + norm1(t(i + 1, i + 1)));
    if (norm1(t(i + 1, i)) <= tol) {
      t(i + 1, i) = 0.0;
      return true;
    }
    return false;
  };
  while (true) {
    while (iu > 0 && negligible(iu - 1)) {
      iter = 0;
      --iu;
    }
    if (iu == 0) break;
    ++iter;
    if (++total > max_iter) {
      throw Error(ErrorKind::kNonGeneric, "numkernel", "QR iteration did not converge");
    }
    std::size_t il = iu - 1;
    while (il > 0 && !negligible(il - 1)) --il;

    const Complex shift = wilkinson_shift(t, iu, iter);
    Givens g = Givens::make(t(il, il) - shift, t(il + 1, il));
    g.apply_left(t, il, il, n);
    g.apply_right_adjoint(t, il, 0, std::min(il + 2, iu) + 1);
    if (z != nullptr) g.apply_right_adjoint(*z, il, 0, n);
    for (std::size_t i = il + 1; i < iu; ++i) {
      g = Givens::make(t(i, i - 1), t(i + 1, i - 1));
      g.apply_left(t, i, i - 1, n);
      t(i + 1, i - 1) = 0.0;
      g.apply_right_adjoint(t, i, 0, std::min(i + 2, iu) + 1);
      if (z != nullptr) g.apply_right_adjoint(*z, i, 0, n);
    }
  }
}

// Parlett-Reinsch diagonal scaling by powers of two.
void balance(CMatrix& m) {
  const std::size_t n = m.rows();
  constexpr double radix = 2.0;
  bool converged = false;
  while (!converged) {
    converged = true;
    for (std::size_t i = 0; i < n; ++i) {
      double c = 0.0;
      double r = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(m(j, i));
        r += std::abs(m(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix;
      double f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= radix * radix;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= radix * radix;
      }
      if ((c + r) / f < 0.95 * s) {
        converged = false;
        for (std::size_t j = 0; j < n; ++j) m(i, j) /= f;
        for (std::size_t j = 0; j < n; ++j) m(j, i) *= f;
      }
    }
  }
}

double rounded_key(double x) { return std::round(x * 1e10); }

}  // namespace

CVector EigenSystem::right_vector(std::size_t i) const {
  CVector v(right.rows());
  for (std::size_t k = 0; k < right.rows(); ++k) v[k] = right(k, i);
  return v;
}

CVector EigenSystem::left_vector(std::size_t i) const {
  const auto r = left.row(i);
  return CVector(r.begin(), r.end());
}

CVector eigenvalues(const CMatrix& m) {
  if (!m.square()) throw Error(ErrorKind::kDimension, "numkernel", "eigenvalues of non-square matrix");
  CMatrix t = m;
  balance(t);
  hessenberg(t, nullptr);
  schur_triangularize(t, nullptr);
  CVector out(t.rows());
  for (std::size_t i = 0; i < t.rows(); ++i) out[i] = t(i, i);
  return out;
}

EigenSystem eig_biorthogonal(const CMatrix& m, const EigOptions& options) {
  if (!m.square()) throw Error(ErrorKind::kDimension, "numkernel", "eigen-decomposition of non-square matrix");
  const std::size_t n = m.rows();
  CMatrix t = m;
  CMatrix z = CMatrix::identity(n);
  hessenberg(t, &z);
  schur_triangularize(t, &z);

  const double tnorm = std::max(max_abs(t), std::numeric_limits<double>::min());
  const double smin = kEps * tnorm;
  auto clamp = [smin](Complex d) { return std::abs(d) < smin ? Complex(smin) : d; };

  CMatrix xr(n, n);  // eigenvectors of T, columns
  CMatrix yl(n, n);  // left eigenvectors of T, rows
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t kk = 0; kk < count; ++kk) {
    const auto k = static_cast<std::size_t>(kk);
    const Complex lam = t(k, k);
    xr(k, k) = 1.0;
    for (std::size_t jj = k; jj-- > 0;) {
      Complex s = 0.0;
      for (std::size_t q = jj + 1; q <= k; ++q) s += t(jj, q) * xr(q, k);
      xr(jj, k) = -s / clamp(t(jj, jj) - lam);
    }
    yl(k, k) = 1.0;
    for (std::size_t j = k + 1; j < n; ++j) {
      Complex s = 0.0;
      for (std::size_t q = k; q < j; ++q) s += yl(k, q) * t(q, j);
      yl(k, j) = -s / clamp(t(j, j) - lam);
    }
  }
  CMatrix right = z * xr;
  CMatrix left = yl * adjoint(z);

  EigenSystem sys;
  sys.eigenvalues.resize(n);
  sys.right = CMatrix(n, n);
  sys.left = CMatrix(n, n);
  sys.degenerate.assign(n, false);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const Complex la = t(a, a);
    const Complex lb = t(b, b);
    const double ra = rounded_key(la.real());
    const double rb = rounded_key(lb.real());
    if (ra != rb) return ra < rb;
    const double ia = rounded_key(la.imag());
    const double ib = rounded_key(lb.imag());
    if (ia != ib) return ia < ib;
    return a < b;
  });

  for (std::size_t out = 0; out < n; ++out) {
    const std::size_t k = order[out];
    sys.eigenvalues[out] = t(k, k);
    double rn = 0.0;
    for (std::size_t i = 0; i < n; ++i) rn += std::norm(right(i, k));
    rn = std::sqrt(rn);
    Complex pair = 0.0;
    double ln = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      pair += left(k, i) * right(i, k) / rn;
      ln += std::norm(left(k, i));
    }
    ln = std::sqrt(ln);
    const bool weak = std::abs(pair) <= 1e-12 * ln;
    if (weak) {
      sys.degenerate[out] = true;
      if (options.require_generic) {
        throw Error(ErrorKind::kNonGeneric, "numkernel", "eigenvector pairing is singular (defective matrix)");
      }
      pair = 1.0;
    }
    for (std::size_t i = 0; i < n; ++i) {
      sys.right(i, out) = right(i, k) / rn;
      sys.left(out, i) = left(k, i) / pair;
    }
  }

  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const Complex la = sys.eigenvalues[a];
      const Complex lb = sys.eigenvalues[b];
      const double scale = std::max({1.0, std::abs(la), std::abs(lb)});
      if (std::abs(la - lb) <= options.degeneracy_tol * scale) {
        sys.degenerate[a] = true;
        sys.degenerate[b] = true;
      }
    }
  }
  if (options.require_generic) {
    for (std::size_t a = 0; a < n; ++a) {
      if (sys.degenerate[a]) {
        throw Error(ErrorKind::kNonGeneric, "numkernel",
                    "degenerate eigenvalue " + std::to_string(sys.eigenvalues[a].real()) + "+" +
                        std::to_string(sys.eigenvalues[a].imag()) + "i");
      }
    }
  }
  return sys;
}

}  // namespace fcs
