#pragma once

// Shared test helpers: seeded random inputs and brute-force references that
// do not go through the library code they check.

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "fcs/numkernel.hpp"

namespace fcs::testing {

inline std::mt19937_64& rng() {
  static std::mt19937_64 gen(20240607);
  return gen;
}

inline double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }

inline Complex random_complex(double scale = 1.0) { return {uniform(-scale, scale), uniform(-scale, scale)}; }

inline CMatrix random_matrix(std::size_t r, std::size_t c, double scale = 1.0) {
  CMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = random_complex(scale);
  return m;
}

inline double rel_err(Complex a, Complex b) {
  const double s = std::abs(b);
  return s > 0.0 ? std::abs(a - b) / s : std::abs(a - b);
}

// Plain triple loop.
inline CMatrix naive_mul(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k)
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += a(i, k) * b(k, j);
  return out;
}

inline CMatrix naive_kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

inline double max_diff(const CMatrix& a, const CMatrix& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) worst = std::max(worst, std::abs(a(i, j) - b(i, j)));
  return worst;
}

// exp(m) by scaling and squaring of a long Taylor series.
inline CMatrix taylor_expm(const CMatrix& m) {
  double norm = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) norm = std::max(norm, std::abs(m(i, j)));
  int squarings = 0;
  while (norm * static_cast<double>(m.rows()) > 0.5) {
    norm /= 2.0;
    ++squarings;
  }
  const CMatrix a = std::pow(0.5, squarings) * m;
  CMatrix term = CMatrix::identity(m.rows());
  CMatrix sum = term;
  for (int k = 1; k < 30; ++k) {
    term = (1.0 / k) * naive_mul(term, a);
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) sum = naive_mul(sum, sum);
  return sum;
}

inline CMatrix sx() {
  CMatrix m(2, 2);
  m(0, 1) = m(1, 0) = 1.0;
  return m;
}
inline CMatrix sy() {
  CMatrix m(2, 2);
  m(0, 1) = Complex(0, -1);
  m(1, 0) = Complex(0, 1);
  return m;
}
inline CMatrix sz() {
  CMatrix m(2, 2);
  m(0, 0) = 1.0;
  m(1, 1) = -1.0;
  return m;
}

// op on `site` (0-based, site 0 most significant) of an L-site chain.
inline CMatrix embed(const CMatrix& op, int site, int length) {
  CMatrix out = CMatrix::identity(1);
  for (int s = 0; s < length; ++s) out = naive_kron(out, s == site ? op : CMatrix::identity(2));
  return out;
}

}  // namespace fcs::testing
