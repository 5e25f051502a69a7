// Timings of the OpenMP kernels against their serial references, with the
// deviation between the two results.
//
//   fcs_bench [--length L] [--repeat n]

#include <CLI11.hpp>
#include <omp.h>

#include <chrono>
#include <cstdio>
#include <functional>

#include "fcs/bethe.hpp"
#include "fcs/formfactor.hpp"
#include "fcs/spin_oracle.hpp"

namespace {

double seconds(const std::function<void()>& body, int repeat) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < repeat; ++i) body();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / repeat;
}

void row(const char* name, double serial, double parallel, double deviation) {
  std::printf("%-22s %10.4f %10.4f %8.2f %10.3g\n", name, serial, parallel, serial / parallel, deviation);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"serial vs OpenMP kernels"};
  int length = 6;
  int repeat = 3;
  app.add_option("--length", length, "chain length (even)");
  app.add_option("--repeat", repeat, "repetitions per timing");
  CLI11_PARSE(app, argc, argv);

  fcs::ChainConfig cfg;
  cfg.length = length;
  const fcs::Twist k = fcs::Twist::sigma_x();
  const fcs::Beta beta{1.0, 0.0, 1.0};
  std::printf("threads %d, L = %d\n", omp_get_max_threads(), length);
  std::printf("%-22s %10s %10s %8s %10s\n", "kernel", "serial_s", "omp_s", "speedup", "deviation");

  const fcs::CMatrix t = fcs::transfer_matrix(k, fcs::Complex(0.3, 0.2), cfg);
  fcs::CMatrix ps, pp;
  const double ms = seconds([&] { ps = fcs::matmul_serial(t, t); }, repeat);
  const double mp = seconds([&] { pp = t * t; }, repeat);
  row("matmul", ms, mp, fcs::max_abs(ps - pp) / fcs::max_abs(ps));

  const fcs::Twist kt = fcs::tilde_twist(k, beta);
  const auto rho = fcs::solve_rho_link(k, kt).front();
  const auto data = fcs::transfer_eigen_data(kt, cfg, true);
  std::vector<fcs::SpectralLine> ls, lp;
  const double es = seconds([&] { ls = fcs::enumerate_spectrum(data, rho.tilde, cfg, false); }, repeat);
  const double ep = seconds([&] { lp = fcs::enumerate_spectrum(data, rho.tilde, cfg, true); }, repeat);
  double dev = 0.0;
  for (std::size_t i = 0; i < ls.size(); ++i)
    for (std::size_t j = 0; j < ls[i].rapidities.roots.size(); ++j)
      dev = std::max(dev, std::abs(ls[i].rapidities.roots[j] - lp[i].rapidities.roots[j]));
  row("enumerate_spectrum", es, ep, dev);

  const std::vector<int> ells{0, length / 2, length};
  fcs::FcsOptions opt;
  fcs::FcsResult rs, rp;
  opt.parallel = false;
  const double fs = seconds([&] { rs = fcs::fcs_sum(k, beta, ells, cfg, opt); }, 1);
  opt.parallel = true;
  const double fp = seconds([&] { rp = fcs::fcs_sum(k, beta, ells, cfg, opt); }, 1);
  double fdev = 0.0;
  for (std::size_t e = 0; e < ells.size(); ++e) fdev = std::max(fdev, std::abs(rs.values[e] - rp.values[e]));
  row("fcs_sum", fs, fp, fdev);
  return 0;
}
