#pragma once

// Dense complex linear algebra and polynomial kernel. Sized for full-space
// spin operators up to 2^10 x 2^10 and polynomials of modest degree.

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "fcs/error.hpp"

namespace fcs {

using Complex = std::complex<double>;

inline constexpr std::size_t kMaxDimension = std::size_t{1} << 10;

template <class T>
class BasicMatrix {
 public:
  BasicMatrix() = default;
  BasicMatrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static BasicMatrix identity(std::size_t n) {
    BasicMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<T> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const T> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }

  BasicMatrix& operator+=(const BasicMatrix& o) {
    require_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  BasicMatrix& operator-=(const BasicMatrix& o) {
    require_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  BasicMatrix& operator*=(const T& s) {
    for (auto& x : data_) x *= s;
    return *this;
  }

  friend BasicMatrix operator+(BasicMatrix a, const BasicMatrix& b) { return a += b; }
  friend BasicMatrix operator-(BasicMatrix a, const BasicMatrix& b) { return a -= b; }
  friend BasicMatrix operator*(BasicMatrix a, const T& s) { return a *= s; }
  friend BasicMatrix operator*(const T& s, BasicMatrix a) { return a *= s; }

 private:
  void require_same_shape(const BasicMatrix& o) const {
    if (o.rows_ != rows_ || o.cols_ != cols_) {
      throw Error(ErrorKind::kDimension, "numkernel", "shape mismatch");
    }
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using CMatrix = BasicMatrix<Complex>;
using CVector = std::vector<Complex>;

// Matrix product; rows are distributed over OpenMP threads.
CMatrix operator*(const CMatrix& a, const CMatrix& b);
CMatrix matmul_serial(const CMatrix& a, const CMatrix& b);
CVector operator*(const CMatrix& a, std::span<const Complex> x);

CMatrix transpose(const CMatrix& m);
CMatrix adjoint(const CMatrix& m);
double max_abs(const CMatrix& m);
double max_abs(std::span<const Complex> v);
CMatrix commutator(const CMatrix& a, const CMatrix& b);
CMatrix matrix_power(const CMatrix& m, int exponent);

// Bilinear (unconjugated) product sum_i a_i b_i.
Complex bilinear(std::span<const Complex> a, std::span<const Complex> b);

// (a (x) b)[(i*rb+k),(j*cb+l)] = a[i,j] b[k,l]
CMatrix kron(const CMatrix& a, const CMatrix& b);

// ---------------------------------------------------------------------------
// LU-based kernels, templated so the same code runs in double and in
// extended precision.

template <class T>
struct LuFactors {
  BasicMatrix<T> lu;
  std::vector<std::size_t> perm;
  int sign = 1;
  bool singular = false;
};

template <class T>
LuFactors<T> lu_factor(BasicMatrix<T> m) {
  using std::abs;
  const std::size_t n = m.rows();
  LuFactors<T> f;
  f.perm.resize(n);
  for (std::size_t i = 0; i < n; ++i) f.perm[i] = i;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    auto best = abs(m(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      auto v = abs(m(i, k));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (best == 0) {
      f.singular = true;
      continue;
    }
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(piv, j));
      std::swap(f.perm[k], f.perm[piv]);
      f.sign = -f.sign;
    }
    const T inv = T(1) / m(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const T factor = m(i, k) * inv;
      m(i, k) = factor;
      if (factor == T(0)) continue;
      for (std::size_t j = k + 1; j < n; ++j) m(i, j) -= factor * m(k, j);
    }
  }
  f.lu = std::move(m);
  return f;
}

template <class T>
T determinant(const BasicMatrix<T>& m) {
  if (!m.square()) throw Error(ErrorKind::kDimension, "numkernel", "determinant of non-square matrix");
  if (m.rows() == 0) return T(1);
  auto f = lu_factor(m);
  if (f.singular) return T(0);
  T det = T(f.sign);
  for (std::size_t i = 0; i < m.rows(); ++i) det *= f.lu(i, i);
  return det;
}

// Solves m x = rhs. Pivots below rel_tol * max|m| are treated as singular.
template <class T>
std::vector<T> lu_solve(const BasicMatrix<T>& m, std::span<const T> rhs, double rel_tol = 1e-14) {
  using std::abs;
  const std::size_t n = m.rows();
  if (!m.square() || rhs.size() != n) {
    throw Error(ErrorKind::kDimension, "numkernel", "solve: shape mismatch");
  }
  decltype(abs(T{})) scale = 0;
  for (const auto& x : m.data()) scale = std::max<decltype(scale)>(scale, abs(x));
  auto f = lu_factor(m);
  for (std::size_t i = 0; i < n; ++i) {
    if (f.singular || abs(f.lu(i, i)) <= rel_tol * scale) {
      throw Error(ErrorKind::kSingular, "numkernel", "matrix is singular to working tolerance");
    }
  }
  std::vector<T> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = rhs[f.perm[i]];
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) x[i] -= f.lu(i, j) * x[j];
  }
  for (std::size_t ii = n; ii-- > 0;) {
    for (std::size_t j = ii + 1; j < n; ++j) x[ii] -= f.lu(ii, j) * x[j];
    x[ii] /= f.lu(ii, ii);
  }
  return x;
}

CVector solve_linear(const CMatrix& m, std::span<const Complex> rhs);
CMatrix inverse(const CMatrix& m);

struct LeastSquaresResult {
  CVector x;
  double residual = 0.0;  // ||m x - rhs||_2
};

// Householder QR least squares for rows >= cols.
LeastSquaresResult least_squares(const CMatrix& m, std::span<const Complex> rhs);

// ---------------------------------------------------------------------------
// Eigen-decomposition.

struct EigenSystem {
  CVector eigenvalues;
  CMatrix right;  // column i pairs with eigenvalues[i]
  CMatrix left;   // row i, bilinear: left.row(i) * m = eigenvalues[i] * left.row(i)
  // true where the eigenvalue sits within the degeneracy threshold of another
  std::vector<bool> degenerate;

  std::size_t size() const noexcept { return eigenvalues.size(); }
  CVector right_vector(std::size_t i) const;
  CVector left_vector(std::size_t i) const;
};

struct EigOptions {
  // throw kNonGeneric on degenerate eigenvalues or a singular pairing
  bool require_generic = true;
  double degeneracy_tol = 1e-9;
};

// Hessenberg reduction + shifted QR to complex Schur form; right and left
// eigenvectors from the triangular factor. Pairing normalised so that
// <left_i, right_i> = 1 (bilinear), right vectors have unit 2-norm.
// Eigenvalues ordered lexicographically by (re, im) rounded at 1e-10.
EigenSystem eig_biorthogonal(const CMatrix& m, const EigOptions& options = {});

// Eigenvalues only (balanced), unsorted.
CVector eigenvalues(const CMatrix& m);

// ---------------------------------------------------------------------------
// Polynomials with ascending coefficients.

class CPoly {
 public:
  CPoly() : coeffs_{Complex(0.0)} {}
  explicit CPoly(CVector coeffs);

  static CPoly from_roots(std::span<const Complex> roots);
  static CPoly monomial(std::size_t degree, Complex coefficient = 1.0);

  std::size_t degree() const noexcept { return coeffs_.size() - 1; }
  const CVector& coeffs() const noexcept { return coeffs_; }
  Complex operator[](std::size_t j) const { return j < coeffs_.size() ? coeffs_[j] : Complex(0.0); }
  Complex leading() const { return coeffs_.back(); }
  bool is_zero() const;
  bool monic(double tol = 0.0) const;

  Complex operator()(Complex z) const;
  CPoly derivative() const;
  // p(u + s)
  CPoly shifted(Complex s) const;
  CPoly monic_normalized() const;
  double max_coeff_abs() const;

  friend CPoly operator+(const CPoly& a, const CPoly& b);
  friend CPoly operator-(const CPoly& a, const CPoly& b);
  friend CPoly operator*(const CPoly& a, const CPoly& b);
  friend CPoly operator*(Complex s, const CPoly& a);

 private:
  void trim();
  CVector coeffs_;
};

// Interpolating polynomial of degree nodes.size()-1 (Newton divided
// differences). Throws on coincident nodes.
CPoly poly_from_samples(std::span<const Complex> nodes, std::span<const Complex> values);

// All roots with multiplicity: companion-matrix eigenvalues, each polished by
// at most 40 Newton steps until |p(z)| <= 1e-13 * max|coefficient|.
CVector poly_roots(const CPoly& p);

// ---------------------------------------------------------------------------

// Counting-field vector (beta_x, beta_y, beta_z).
using Beta = std::array<Complex, 3>;

// beta_x sigma^x + beta_y sigma^y + beta_z sigma^z
CMatrix pauli_combination(const Beta& beta);

// exp(sign * Q(beta)) = cosh r I + sign * sinh(r)/r Q, r^2 = Q(beta)^2.
CMatrix mat_exp_pauli(const Beta& beta, int sign);

// sinh(r)/r with the analytic limit at r = 0.
Complex sinhc(Complex r);

// Principal square root of beta . beta.
Complex pauli_radius(const Beta& beta);

CMatrix pauli_x();
CMatrix pauli_y();
CMatrix pauli_z();

}  // namespace fcs
