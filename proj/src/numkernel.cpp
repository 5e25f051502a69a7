#include "fcs/numkernel.hpp"

#include <algorithm>
#include <cmath>

namespace fcs {

namespace {

void require_product_shape(const CMatrix& a, const CMatrix& b) {
  if (a.cols() != b.rows()) {
    throw Error(ErrorKind::kDimension, "numkernel", "matmul: inner dimensions differ");
  }
}

// c(i, :) = a(i, :) * b, skipping zero entries of a (spin operators are sparse).
void multiply_row(const CMatrix& a, const CMatrix& b, CMatrix& c, std::size_t i) {
  auto out = c.row(i);
  for (std::size_t k = 0; k < a.cols(); ++k) {
    const Complex aik = a(i, k);
    if (aik == Complex(0.0)) continue;
    const auto brow = b.row(k);
    for (std::size_t j = 0; j < b.cols(); ++j) out[j] += aik * brow[j];
  }
}

}  // namespace

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
  require_product_shape(a, b);
  CMatrix c(a.rows(), b.cols());
  const auto rows = static_cast<std::ptrdiff_t>(a.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < rows; ++i) multiply_row(a, b, c, static_cast<std::size_t>(i));
  return c;
}

CMatrix matmul_serial(const CMatrix& a, const CMatrix& b) {
  require_product_shape(a, b);
  CMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) multiply_row(a, b, c, i);
  return c;
}

CVector operator*(const CMatrix& a, std::span<const Complex> x) {
  if (a.cols() != x.size()) throw Error(ErrorKind::kDimension, "numkernel", "matvec: size mismatch");
  CVector y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    Complex s = 0.0;
    const auto r = a.row(i);
    for (std::size_t j = 0; j < a.cols(); ++j) s += r[j] * x[j];
    y[i] = s;
  }
  return y;
}

CMatrix transpose(const CMatrix& m) {
  CMatrix t(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) t(j, i) = m(i, j);
  return t;
}

CMatrix adjoint(const CMatrix& m) {
  CMatrix t(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) t(j, i) = std::conj(m(i, j));
  return t;
}

double max_abs(const CMatrix& m) { return max_abs(m.data()); }

double max_abs(std::span<const Complex> v) {
  double best = 0.0;
  for (const auto& x : v) best = std::max(best, std::abs(x));
  return best;
}

CMatrix commutator(const CMatrix& a, const CMatrix& b) { return a * b - b * a; }

CMatrix matrix_power(const CMatrix& m, int exponent) {
  if (!m.square()) throw Error(ErrorKind::kDimension, "numkernel", "power of non-square matrix");
  CMatrix base = exponent < 0 ? inverse(m) : m;
  unsigned e = static_cast<unsigned>(exponent < 0 ? -exponent : exponent);
  CMatrix result = CMatrix::identity(m.rows());
  while (e > 0) {
    if (e & 1U) result = result * base;
    e >>= 1U;
    if (e > 0) base = base * base;
  }
  return result;
}

Complex bilinear(std::span<const Complex> a, std::span<const Complex> b) {
  if (a.size() != b.size()) throw Error(ErrorKind::kDimension, "numkernel", "bilinear: size mismatch");
  Complex s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  const std::size_t rows = a.rows() * b.rows();
  const std::size_t cols = a.cols() * b.cols();
  if (rows > kMaxDimension || cols > kMaxDimension) {
    throw Error(ErrorKind::kDimension, "numkernel",
                "kron: result " + std::to_string(rows) + "x" + std::to_string(cols) +
                    " exceeds the configured maximum (chain too long)");
  }
  CMatrix out(rows, cols);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const Complex aij = a(i, j);
      if (aij == Complex(0.0)) continue;
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
    }
  return out;
}

CVector solve_linear(const CMatrix& m, std::span<const Complex> rhs) { return lu_solve(m, rhs); }

CMatrix inverse(const CMatrix& m) {
  if (!m.square()) throw Error(ErrorKind::kDimension, "numkernel", "inverse of non-square matrix");
  const std::size_t n = m.rows();
  double scale = max_abs(m);
  auto f = lu_factor(m);
  for (std::size_t i = 0; i < n; ++i) {
    if (f.singular || std::abs(f.lu(i, i)) <= 1e-14 * scale) {
      throw Error(ErrorKind::kSingular, "numkernel", "inverse: matrix is singular to working tolerance");
    }
  }
  CMatrix inv(n, n);
  const auto cols = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t cc = 0; cc < cols; ++cc) {
    const auto c = static_cast<std::size_t>(cc);
    CVector x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = f.perm[i] == c ? 1.0 : 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < i; ++j) x[i] -= f.lu(i, j) * x[j];
    for (std::size_t ii = n; ii-- > 0;) {
      for (std::size_t j = ii + 1; j < n; ++j) x[ii] -= f.lu(ii, j) * x[j];
      x[ii] /= f.lu(ii, ii);
    }
    for (std::size_t i = 0; i < n; ++i) inv(i, c) = x[i];
  }
  return inv;
}

LeastSquaresResult least_squares(const CMatrix& m, std::span<const Complex> rhs) {
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  if (rhs.size() != rows) throw Error(ErrorKind::kDimension, "numkernel", "least_squares: size mismatch");
  if (rows < cols) throw Error(ErrorKind::kDimension, "numkernel", "least_squares: underdetermined system");

  CMatrix a = m;
  CVector b(rhs.begin(), rhs.end());
  const double scale = std::max(max_abs(m), 1e-300);
  for (std::size_t k = 0; k < cols; ++k) {
    double norm = 0.0;
    for (std::size_t i = k; i < rows; ++i) norm += std::norm(a(i, k));
    norm = std::sqrt(norm);
    if (norm <= 1e-13 * scale) {
      throw Error(ErrorKind::kSingular, "numkernel", "least_squares: rank deficient system");
    }
    const Complex x0 = a(k, k);
    const Complex phase = std::abs(x0) > 0 ? x0 / std::abs(x0) : Complex(1.0);
    const Complex alpha = -phase * norm;
    CVector v(rows - k);
    for (std::size_t i = k; i < rows; ++i) v[i - k] = a(i, k);
    v[0] -= alpha;
    double vnorm = 0.0;
    for (const auto& x : v) vnorm += std::norm(x);
    vnorm = std::sqrt(vnorm);
    for (auto& x : v) x /= vnorm;
    // a <- (I - 2 v v^H) a on rows k.., b likewise
    for (std::size_t j = k; j < cols; ++j) {
      Complex s = 0.0;
      for (std::size_t i = k; i < rows; ++i) s += std::conj(v[i - k]) * a(i, j);
      for (std::size_t i = k; i < rows; ++i) a(i, j) -= 2.0 * v[i - k] * s;
    }
    Complex s = 0.0;
    for (std::size_t i = k; i < rows; ++i) s += std::conj(v[i - k]) * b[i];
    for (std::size_t i = k; i < rows; ++i) b[i] -= 2.0 * v[i - k] * s;
  }
  LeastSquaresResult result;
  result.x.assign(cols, 0.0);
  for (std::size_t ii = cols; ii-- > 0;) {
    Complex s = b[ii];
    for (std::size_t j = ii + 1; j < cols; ++j) s -= a(ii, j) * result.x[j];
    result.x[ii] = s / a(ii, ii);
  }
  // residual against the original system
  const CVector fitted = m * std::span<const Complex>(result.x);
  double r2 = 0.0;
  for (std::size_t i = 0; i < rows; ++i) r2 += std::norm(fitted[i] - rhs[i]);
  result.residual = std::sqrt(r2);
  return result;
}

// ---------------------------------------------------------------------------

CMatrix pauli_x() {
  CMatrix m(2, 2);
  m(0, 1) = 1.0;
  m(1, 0) = 1.0;
  return m;
}

CMatrix pauli_y() {
  CMatrix m(2, 2);
  m(0, 1) = Complex(0.0, -1.0);
  m(1, 0) = Complex(0.0, 1.0);
  return m;
}

CMatrix pauli_z() {
  CMatrix m(2, 2);
  m(0, 0) = 1.0;
  m(1, 1) = -1.0;
  return m;
}

CMatrix pauli_combination(const Beta& beta) {
  return beta[0] * pauli_x() + beta[1] * pauli_y() + beta[2] * pauli_z();
}

Complex pauli_radius(const Beta& beta) {
  return std::sqrt(beta[0] * beta[0] + beta[1] * beta[1] + beta[2] * beta[2]);
}

Complex sinhc(Complex r) {
  if (std::abs(r) < 1e-4) {
    const Complex r2 = r * r;
    return 1.0 + r2 / 6.0 + r2 * r2 / 120.0;
  }
  return std::sinh(r) / r;
}

CMatrix mat_exp_pauli(const Beta& beta, int sign) {
  const Complex r = pauli_radius(beta);
  return std::cosh(r) * CMatrix::identity(2) + (static_cast<double>(sign) * sinhc(r)) * pauli_combination(beta);
}

}  // namespace fcs
