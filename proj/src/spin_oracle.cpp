#include "fcs/spin_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fcs {

namespace {

constexpr const char* kModule = "spin_oracle";

int bit_position(int site, const ChainConfig& cfg) { return cfg.length - 1 - site; }

// out += x * E^{j m}_site, where E^{jm} = |j><m| on one site.
// Column s of the product is column (s with bit -> j) of x when bit(s) == m.
void add_times_site_unit(const CMatrix& x, int site, int j, int m, const ChainConfig& cfg, CMatrix& out) {
  const std::size_t n = cfg.dimension();
  const std::size_t mask = std::size_t{1} << bit_position(site, cfg);
  const auto rows = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t rr = 0; rr < rows; ++rr) {
    const auto r = static_cast<std::size_t>(rr);
    const auto src = x.row(r);
    auto dst = out.row(r);
    for (std::size_t s = 0; s < n; ++s) {
      const int bit = (s & mask) ? 1 : 0;
      if (bit != m) continue;
      const std::size_t from = j ? (s | mask) : (s & ~mask);
      dst[s] += src[from];
    }
  }
}

CMatrix kron_chain(const std::vector<CMatrix>& factors) {
  CMatrix out = CMatrix::identity(1);
  for (const auto& f : factors) out = kron(out, f);
  return out;
}

CMatrix two_site_operator(const CMatrix& op_i, int i, const CMatrix& op_j, int j, const ChainConfig& cfg) {
  std::vector<CMatrix> factors(static_cast<std::size_t>(cfg.length), CMatrix::identity(2));
  factors[static_cast<std::size_t>(i)] = op_i;
  if (i == j) {
    factors[static_cast<std::size_t>(i)] = op_i * op_j;
  } else {
    factors[static_cast<std::size_t>(j)] = op_j;
  }
  return kron_chain(factors);
}

// Derivative at 0 of the Lagrange basis polynomials on the given nodes.
std::vector<Complex> lagrange_derivative_weights_at_zero(const std::vector<Complex>& nodes) {
  const std::size_t n = nodes.size();
  std::vector<Complex> w(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    Complex denom = 1.0;
    for (std::size_t m = 0; m < n; ++m)
      if (m != k) denom *= nodes[k] - nodes[m];
    Complex sum = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
      if (m == k) continue;
      Complex prod = 1.0;
      for (std::size_t q = 0; q < n; ++q)
        if (q != k && q != m) prod *= -nodes[q];
      sum += prod;
    }
    w[k] = sum / denom;
  }
  return w;
}

double frobenius(const CMatrix& m) {
  double s = 0.0;
  for (const auto& x : m.data()) s += std::norm(x);
  return std::sqrt(s);
}

double rounded(double x) { return std::round(x * 1e10); }

bool lex_rounded_less(Complex a, Complex b) {
  if (rounded(a.real()) != rounded(b.real())) return rounded(a.real()) < rounded(b.real());
  return rounded(a.imag()) < rounded(b.imag());
}

}  // namespace

void ChainConfig::validate() const {
  if (length < 1 || length > 10) {
    throw Error(ErrorKind::kInvalidArgument, kModule, "chain length must lie in 1..10, got " + std::to_string(length));
  }
  if (c == Complex(0.0)) throw Error(ErrorKind::kInvalidArgument, kModule, "R-matrix scale c must be nonzero");
}

void ChainConfig::require_even() const {
  validate();
  if (length % 2 != 0 || length < 2) {
    throw Error(ErrorKind::kInvalidArgument, kModule, "the Bethe pipeline needs even L >= 2, got " + std::to_string(length));
  }
}

Complex ChainConfig::a(Complex u) const { return std::pow((u + c) / c, length); }
Complex ChainConfig::d(Complex u) const { return std::pow(u / c, length); }

const CMatrix& Monodromy::block(Block which) const {
  switch (which) {
    case Block::kA: return a;
    case Block::kB: return b;
    case Block::kC: return c;
    case Block::kD: return d;
  }
  return a;
}

CMatrix permutation_matrix() {
  CMatrix p(4, 4);
  p(0, 0) = 1.0;
  p(1, 2) = 1.0;
  p(2, 1) = 1.0;
  p(3, 3) = 1.0;
  return p;
}

CMatrix r_matrix(Complex u, const ChainConfig& cfg) {
  return (u / cfg.c) * CMatrix::identity(4) + permutation_matrix();
}

Monodromy monodromy(Complex u, const ChainConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.dimension();
  std::array<std::array<CMatrix, 2>, 2> t{{{CMatrix::identity(n), CMatrix(n, n)}, {CMatrix(n, n), CMatrix::identity(n)}}};
  const Complex scale = u / cfg.c;
  for (int site = 0; site < cfg.length; ++site) {
    std::array<std::array<CMatrix, 2>, 2> next;
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        CMatrix acc = scale * t[i][j];
        // R[m][j] = (u/c) delta_mj + E^{jm}_site
        for (int m = 0; m < 2; ++m) add_times_site_unit(t[i][m], site, j, m, cfg, acc);
        next[i][j] = std::move(acc);
      }
    }
    t = std::move(next);
  }
  return {std::move(t[0][0]), std::move(t[0][1]), std::move(t[1][0]), std::move(t[1][1])};
}

CMatrix monodromy_entry(Block which, Complex u, const ChainConfig& cfg) { return monodromy(u, cfg).block(which); }

Monodromy modified_monodromy(Complex u, const MabaSide& side, const ChainConfig& cfg) {
  const Twist& k = side.twist;
  if (!k.generic()) throw Error(ErrorKind::kNonGeneric, kModule, "modified operators need nonzero kp and km");
  const Monodromy t = monodromy(u, cfg);
  // A_m = sqrt(mu) [[1, rho2/km], [rho1/kp, 1]], B_m = sqrt(mu) [[1, rho1/km], [rho2/kp, 1]]
  const std::array<std::array<Complex, 2>, 2> am{{{1.0, side.rho2 / k.km}, {side.rho1 / k.kp, 1.0}}};
  const std::array<std::array<Complex, 2>, 2> bm{{{1.0, side.rho1 / k.km}, {side.rho2 / k.kp, 1.0}}};
  const std::array<std::array<const CMatrix*, 2>, 2> blocks{{{&t.a, &t.b}, {&t.c, &t.d}}};
  std::array<std::array<CMatrix, 2>, 2> out;
  const std::size_t n = cfg.dimension();
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      CMatrix acc(n, n);
      for (int p = 0; p < 2; ++p) {
        for (int q = 0; q < 2; ++q) {
          const Complex w = side.mu * am[i][p] * bm[q][j];
          if (w == Complex(0.0)) continue;
          acc += w * *blocks[p][q];
        }
      }
      out[i][j] = std::move(acc);
    }
  }
  return {std::move(out[0][0]), std::move(out[0][1]), std::move(out[1][0]), std::move(out[1][1])};
}

CMatrix modified_entry(Block which, Complex u, const MabaSide& side, const ChainConfig& cfg) {
  return modified_monodromy(u, side, cfg).block(which);
}

CMatrix transfer_matrix(const Twist& k, Complex u, const ChainConfig& cfg) {
  const Monodromy t = monodromy(u, cfg);
  CMatrix out = k.k1 * t.a;
  out += k.kp * t.c;
  out += k.km * t.b;
  out += k.k2 * t.d;
  return out;
}

CMatrix site_operator(const CMatrix& op, int site, const ChainConfig& cfg) {
  if (site < 0 || site >= cfg.length) throw Error(ErrorKind::kInvalidArgument, kModule, "site index out of range");
  std::vector<CMatrix> factors(static_cast<std::size_t>(cfg.length), CMatrix::identity(2));
  factors[static_cast<std::size_t>(site)] = op;
  return kron_chain(factors);
}

CMatrix shift_operator(const ChainConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.dimension();
  const int len = cfg.length;
  CMatrix u(n, n);
  for (std::size_t s = 0; s < n; ++s) {
    const std::size_t top = (s >> (len - 1)) & 1U;
    const std::size_t target = ((s << 1) & (n - 1)) | top;
    u(target, s) = 1.0;
  }
  return u;
}

CMatrix counting_operator(const CountingSpec& spec, const ChainConfig& cfg) {
  cfg.validate();
  if (spec.ell < 0 || spec.ell > cfg.length) {
    throw Error(ErrorKind::kInvalidArgument, kModule, "ell must lie in 0..L, got " + std::to_string(spec.ell));
  }
  const CMatrix e = mat_exp_pauli(spec.beta, +1);
  std::vector<CMatrix> factors(static_cast<std::size_t>(cfg.length), CMatrix::identity(2));
  for (int j = 0; j < spec.ell; ++j) factors[static_cast<std::size_t>(j)] = e;
  return kron_chain(factors);
}

CVector apply_counting(const CountingSpec& spec, std::span<const Complex> v, const ChainConfig& cfg) {
  if (spec.ell < 0 || spec.ell > cfg.length) {
    throw Error(ErrorKind::kInvalidArgument, kModule, "ell must lie in 0..L, got " + std::to_string(spec.ell));
  }
  if (v.size() != cfg.dimension()) throw Error(ErrorKind::kDimension, kModule, "vector size does not match 2^L");
  const CMatrix e = mat_exp_pauli(spec.beta, +1);
  CVector out(v.begin(), v.end());
  for (int site = 0; site < spec.ell; ++site) {
    const std::size_t mask = std::size_t{1} << bit_position(site, cfg);
    for (std::size_t s = 0; s < out.size(); ++s) {
      if (s & mask) continue;
      const Complex x0 = out[s];
      const Complex x1 = out[s | mask];
      out[s] = e(0, 0) * x0 + e(0, 1) * x1;
      out[s | mask] = e(1, 0) * x0 + e(1, 1) * x1;
    }
  }
  return out;
}

std::vector<Complex> interpolation_nodes(const ChainConfig& cfg) {
  std::vector<Complex> nodes;
  for (int k = 0; k <= cfg.length; ++k) nodes.emplace_back(k - cfg.length / 2.0, 0.0);
  return nodes;
}

Complex diagonalisation_point(const ChainConfig& cfg) { return Complex(0.5, 0.5) * cfg.c; }

CMatrix hamiltonian_logderiv(const Twist& k, const ChainConfig& cfg) {
  cfg.validate();
  const auto nodes = interpolation_nodes(cfg);
  const auto weights = lagrange_derivative_weights_at_zero(nodes);
  const std::size_t n = cfg.dimension();
  CMatrix derivative(n, n);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (weights[i] == Complex(0.0)) continue;
    derivative += weights[i] * transfer_matrix(k, nodes[i], cfg);
  }
  CMatrix t0_inv;
  try {
    t0_inv = inverse(transfer_matrix(k, 0.0, cfg));
  } catch (const Error&) {
    throw Error(ErrorKind::kSingular, kModule, "t_K(0) is singular (twist matrix not invertible)");
  }
  CMatrix h = cfg.c * (derivative * t0_inv);
  h += Complex(cfg.length / 2.0) * CMatrix::identity(n);
  return h;
}

std::array<std::array<Complex, 3>, 3> boundary_map(const Twist& k) {
  const Complex g = k.gamma();
  if (std::abs(g) == 0.0) throw Error(ErrorKind::kInvalidArgument, kModule, "twist determinant gamma vanishes");
  const Complex i(0.0, 1.0);
  const Complex k1 = k.k1, k2 = k.k2, kp = k.kp, km = k.km;
  std::array<std::array<Complex, 3>, 3> m{};
  m[0][0] = (k1 * k1 + k2 * k2 - kp * kp - km * km) / (2.0 * g);
  m[0][1] = (k1 * k1 - k2 * k2 + kp * kp - km * km) / (2.0 * i * g);
  m[0][2] = (k2 * km - k1 * kp) / g;
  m[1][0] = (k2 * k2 - k1 * k1 + kp * kp - km * km) / (2.0 * i * g);
  m[1][1] = (k1 * k1 + k2 * k2 + kp * kp + km * km) / (2.0 * g);
  m[1][2] = (k2 * km + k1 * kp) / (i * g);
  m[2][0] = (k2 * kp - k1 * km) / g;
  m[2][1] = i * (k1 * km + k2 * kp) / g;
  m[2][2] = (k1 * k2 + kp * km) / g;
  return m;
}

CMatrix hamiltonian_boundary(const Twist& k, const ChainConfig& cfg) {
  cfg.validate();
  if (cfg.length < 2) throw Error(ErrorKind::kInvalidArgument, kModule, "boundary Hamiltonian needs L >= 2");
  const auto map = boundary_map(k);
  const std::array<CMatrix, 3> s{pauli_x(), pauli_y(), pauli_z()};
  const std::size_t n = cfg.dimension();
  CMatrix h(n, n);
  for (int j = 0; j + 1 < cfg.length; ++j)
    for (int a = 0; a < 3; ++a) h += two_site_operator(s[a], j, s[a], j + 1, cfg);
  for (int a = 0; a < 3; ++a) {
    CMatrix image(2, 2);
    for (int b = 0; b < 3; ++b) image += map[a][b] * s[b];
    h += two_site_operator(s[a], cfg.length - 1, image, 0, cfg);
  }
  h *= Complex(cfg.coupling);
  return h;
}

AffineFit fit_affine(const CMatrix& target, const CMatrix& basis) {
  if (target.rows() != basis.rows() || target.cols() != basis.cols() || !target.square()) {
    throw Error(ErrorKind::kDimension, kModule, "affine fit: shape mismatch");
  }
  const std::size_t n = target.rows();
  // normal equations for min ||target - alpha basis - delta I||_F
  Complex bb = 0.0, bi = 0.0, bt = 0.0, it = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      bb += std::norm(basis(i, j));
      bt += std::conj(basis(i, j)) * target(i, j);
    }
    bi += std::conj(basis(i, i));
    it += target(i, i);
  }
  CMatrix normal(2, 2);
  normal(0, 0) = bb;
  normal(0, 1) = bi;
  normal(1, 0) = std::conj(bi);
  normal(1, 1) = static_cast<double>(n);
  const CVector rhs{bt, it};
  const CVector x = solve_linear(normal, rhs);
  AffineFit fit{x[0], x[1], 0.0};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const Complex model = fit.alpha * basis(i, j) + (i == j ? fit.delta : Complex(0.0));
      fit.residual = std::max(fit.residual, std::abs(target(i, j) - model));
    }
  return fit;
}

std::size_t TransferEigenData::select(std::size_t energy_rank) const {
  if (energy_rank >= energy_order.size()) {
    throw Error(ErrorKind::kInvalidArgument, kModule,
                "state index " + std::to_string(energy_rank) + " out of range (" + std::to_string(energy_order.size()) +
                    " states)");
  }
  const std::size_t idx = energy_order[energy_rank];
  if (states[idx].degenerate) {
    throw Error(ErrorKind::kNonGeneric, kModule,
                "selected state " + std::to_string(energy_rank) + " has a degenerate transfer eigenvalue");
  }
  return idx;
}

TransferEigenData transfer_eigen_data(const Twist& k, const ChainConfig& cfg, bool require_generic) {
  cfg.validate();
  const std::size_t n = cfg.dimension();
  const CMatrix m = transfer_matrix(k, diagonalisation_point(cfg), cfg);
  EigOptions opts;
  opts.require_generic = require_generic;
  const EigenSystem sys = eig_biorthogonal(m, opts);

  const auto nodes = interpolation_nodes(cfg);
  std::vector<CVector> samples(n, CVector(nodes.size()));
  std::vector<double> residuals(n, 0.0);
  for (std::size_t q = 0; q < nodes.size(); ++q) {
    const CMatrix t = transfer_matrix(k, nodes[q], cfg);
    const double tnorm = std::max(frobenius(t), 1e-300);
    const CMatrix tr = t * sys.right;
    for (std::size_t i = 0; i < n; ++i) {
      Complex lam = 0.0;
      for (std::size_t r = 0; r < n; ++r) lam += sys.left(i, r) * tr(r, i);
      samples[i][q] = lam;
      double res = 0.0;
      for (std::size_t r = 0; r < n; ++r) res += std::norm(tr(r, i) - lam * sys.right(r, i));
      residuals[i] = std::max(residuals[i], std::sqrt(res) / tnorm);
    }
  }

  TransferEigenData data;
  data.twist = k;
  data.states.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& st = data.states[i];
    st.lambda = poly_from_samples(nodes, samples[i]);
    st.left = sys.left_vector(i);
    st.right = sys.right_vector(i);
    st.joint_residual = residuals[i];
    st.degenerate = sys.degenerate[i] || residuals[i] > 1e-8;
    st.energy = cfg.c * st.lambda[1] / st.lambda[0] + Complex(cfg.length / 2.0);
    if (require_generic && st.degenerate) {
      throw Error(ErrorKind::kNonGeneric, kModule,
                  "state " + std::to_string(i) + " is not a joint eigenvector at the interpolation nodes");
    }
  }

  data.energy_order.resize(n);
  std::iota(data.energy_order.begin(), data.energy_order.end(), 0);
  std::stable_sort(data.energy_order.begin(), data.energy_order.end(), [&](std::size_t a, std::size_t b) {
    return data.states[a].energy.real() < data.states[b].energy.real();
  });
  // equal energies (relative 1e-9) are ordered by Lambda(0)
  for (std::size_t lo = 0; lo < n;) {
    std::size_t hi = lo + 1;
    while (hi < n) {
      const double e0 = data.states[data.energy_order[hi - 1]].energy.real();
      const double e1 = data.states[data.energy_order[hi]].energy.real();
      if (std::abs(e1 - e0) > 1e-9 * std::max(1.0, std::abs(e0))) break;
      ++hi;
    }
    std::stable_sort(data.energy_order.begin() + static_cast<std::ptrdiff_t>(lo),
                     data.energy_order.begin() + static_cast<std::ptrdiff_t>(hi), [&](std::size_t a, std::size_t b) {
                       return lex_rounded_less(data.states[a].lambda[0], data.states[b].lambda[0]);
                     });
    lo = hi;
  }
  return data;
}

Complex fcs_direct(const TransferEigenData& data, std::size_t state, const CountingSpec& spec, const ChainConfig& cfg) {
  const auto& st = data.states.at(state);
  if (st.degenerate) throw Error(ErrorKind::kNonGeneric, kModule, "selected state is degenerate");
  const CVector moved = apply_counting(spec, st.right, cfg);
  return bilinear(st.left, moved) / bilinear(st.left, st.right);
}

Complex fcs_direct(const Twist& k, const CountingSpec& spec, std::size_t energy_rank, const ChainConfig& cfg) {
  const TransferEigenData data = transfer_eigen_data(k, cfg, false);
  return fcs_direct(data, data.select(energy_rank), spec, cfg);
}

std::vector<EigenbasisTerm> eigenbasis_terms(const TransferEigenData& k_data, std::size_t state,
                                             const TransferEigenData& kt_data) {
  const auto& s = k_data.states.at(state);
  const Complex norm = bilinear(s.left, s.right);
  std::vector<EigenbasisTerm> out;
  out.reserve(kt_data.states.size());
  for (const auto& t : kt_data.states) {
    const Complex w = bilinear(s.left, t.right) * bilinear(t.left, s.right) / (norm * bilinear(t.left, t.right));
    out.push_back({w, s.lambda[0] / t.lambda[0]});
  }
  return out;
}

CVector bethe_vector(const MabaSide& side, std::span<const Complex> roots, const ChainConfig& cfg) {
  CVector v(cfg.dimension(), 0.0);
  v[0] = 1.0;
  for (const Complex u : roots) v = modified_entry(Block::kB, u, side, cfg) * std::span<const Complex>(v);
  return v;
}

CVector dual_bethe_vector(const MabaSide& side, std::span<const Complex> roots, const ChainConfig& cfg) {
  CVector v(cfg.dimension(), 0.0);
  v[0] = 1.0;
  for (const Complex u : roots) v = transpose(modified_entry(Block::kC, u, side, cfg)) * std::span<const Complex>(v);
  return v;
}

Complex bethe_overlap(const MabaSide& c_side, std::span<const Complex> v, const MabaSide& b_side,
                      std::span<const Complex> u, const ChainConfig& cfg) {
  return bilinear(dual_bethe_vector(c_side, v, cfg), bethe_vector(b_side, u, cfg));
}

double ybe_residual(Complex u, Complex v, Complex w, const ChainConfig& cfg) {
  const CMatrix id2 = CMatrix::identity(2);
  const CMatrix p23 = kron(id2, permutation_matrix());
  auto r12 = [&](Complex x) { return kron(r_matrix(x, cfg), id2); };
  auto r23 = [&](Complex x) { return kron(id2, r_matrix(x, cfg)); };
  auto r13 = [&](Complex x) { return p23 * r12(x) * p23; };
  const CMatrix lhs = r12(u - v) * r13(u - w) * r23(v - w);
  const CMatrix rhs = r23(v - w) * r13(u - w) * r12(u - v);
  return max_abs(lhs - rhs) / std::max(max_abs(lhs), 1e-300);
}

double rtt_residual(Complex u, Complex v, const ChainConfig& cfg) {
  // entry (ik),(jl): (x/c)[T_ij(u), T_kl(v)] + T_kj(u) T_il(v) - T_kj(v) T_il(u)
  const Monodromy tu = monodromy(u, cfg);
  const Monodromy tv = monodromy(v, cfg);
  auto blk = [](const Monodromy& t, int i, int j) -> const CMatrix& {
    static constexpr Block order[2][2] = {{Block::kA, Block::kB}, {Block::kC, Block::kD}};
    return t.block(order[i][j]);
  };
  const Complex x = (u - v) / cfg.c;
  double worst = 0.0;
  double scale = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
          const CMatrix p1 = blk(tu, i, j) * blk(tv, k, l);
          const CMatrix p2 = blk(tv, k, l) * blk(tu, i, j);
          const CMatrix p3 = blk(tu, k, j) * blk(tv, i, l);
          const CMatrix p4 = blk(tv, k, j) * blk(tu, i, l);
          CMatrix diff = x * (p1 - p2);
          diff += p3;
          diff -= p4;
          worst = std::max(worst, max_abs(diff));
          scale = std::max({scale, std::abs(x) * max_abs(p1), max_abs(p3), max_abs(p4)});
        }
  return worst / std::max(scale, 1e-300);
}

double transfer_commutator_residual(const Twist& k, Complex u, Complex v, const ChainConfig& cfg) {
  const CMatrix tu = transfer_matrix(k, u, cfg);
  const CMatrix tv = transfer_matrix(k, v, cfg);
  const CMatrix prod = tu * tv;
  return max_abs(prod - tv * tu) / std::max(max_abs(prod), 1e-300);
}

double quantum_inverse_residual(const Twist& k, const CountingSpec& spec, const ChainConfig& cfg) {
  const CMatrix tk = transfer_matrix(k, 0.0, cfg);
  const CMatrix tkt = transfer_matrix(tilde_twist(k, spec.beta), 0.0, cfg);
  const CMatrix lhs = matrix_power(inverse(tkt), spec.ell) * matrix_power(tk, spec.ell);
  const CMatrix rhs = counting_operator(spec, cfg);
  return max_abs(lhs - rhs) / std::max(1.0, max_abs(rhs));
}

double resolution_residual(const TransferEigenData& data) {
  if (data.states.empty()) return 0.0;
  const std::size_t n = data.states.front().right.size();
  CMatrix sum(n, n);
  for (const auto& st : data.states) {
    const Complex pairing = bilinear(st.left, st.right);
    for (std::size_t i = 0; i < n; ++i) {
      const Complex ri = st.right[i] / pairing;
      if (ri == Complex(0.0)) continue;
      auto row = sum.row(i);
      for (std::size_t j = 0; j < n; ++j) row[j] += ri * st.left[j];
    }
  }
  return max_abs(sum - CMatrix::identity(n));
}

}  // namespace fcs
