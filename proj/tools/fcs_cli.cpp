// fcs_cli: full counting statistics of the twisted XXX chain.
//
//   fcs_cli fcs      [flags]   FCS table (form-factor sum, oracle or both)
//   fcs_cli spectrum [flags]   Bethe lines of K and K~
//   fcs_cli verify   [flags]   invariant groups against the operator oracle
//
// Exit codes: 0 success, 1 verification failure, 2 configuration or
// pipeline error (structured record on stderr).

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "fcs/config.hpp"
#include "fcs/error.hpp"
#include "fcs/report.hpp"
#include "fcs/verify.hpp"

namespace {

struct Flags {
  std::string config;
  std::optional<int> length;
  std::optional<std::string> twist;
  std::optional<std::string> beta;
  std::optional<std::string> ell;
  std::optional<long> state;
  std::optional<std::string> branch;
  std::optional<std::string> mode;
  std::optional<std::string> format;
  std::optional<std::string> out;
  std::vector<std::string> tol;
};

void add_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "YAML run configuration");
  cmd->add_option("--length", f.length, "chain length L (even, 2..10)");
  cmd->add_option("--twist", f.twist, "k1,k2,kp,km or sigma_x | sigma_y | identity");
  cmd->add_option("--beta", f.beta, "bx,by,bz");
  cmd->add_option("--ell", f.ell, "a..b or a comma list");
  cmd->add_option("--state", f.state, "rank in the energy ordering (0 = ground state)");
  cmd->add_option("--branch", f.branch, "rho branch: 0, 1 or both");
  cmd->add_option("--mode", f.mode, "maba, oracle or verify");
  cmd->add_option("--format", f.format, "csv or json");
  cmd->add_option("--out", f.out, "output path (default stdout)");
  cmd->add_option("--tol", f.tol, "tolerance override name=value (repeatable)");
}

fcs::RunConfig build_config(const Flags& f) {
  using namespace fcs;
  RunConfig cfg = f.config.empty() ? RunConfig{} : load_config(f.config);
  if (f.length) {
    cfg.chain.length = *f.length;
    cfg.origin["chain.length"] = "--length";
  }
  if (f.twist) {
    if (*f.twist == "sigma_x") {
      cfg.twist = Twist::sigma_x();
    } else if (*f.twist == "sigma_y") {
      cfg.twist = Twist::sigma_y();
    } else if (*f.twist == "identity" || *f.twist == "periodic") {
      cfg.twist = Twist::identity();
    } else {
      const auto k = parse_complex_list(*f.twist, 4, "--twist");
      cfg.twist = {k[0], k[1], k[2], k[3]};
    }
    cfg.origin["twist"] = "--twist";
  }
  if (f.beta) {
    const auto b = parse_complex_list(*f.beta, 3, "--beta");
    cfg.beta = {b[0], b[1], b[2]};
    cfg.origin["beta"] = "--beta";
  }
  if (f.ell) {
    cfg.ells = parse_ell_spec(*f.ell, "--ell");
    cfg.origin["ell"] = "--ell";
  }
  if (f.state) {
    if (*f.state < 0) throw Error(ErrorKind::kConfig, "fcs_cli", "invalid value for '--state': must be non-negative");
    cfg.state = static_cast<std::size_t>(*f.state);
    cfg.origin["state"] = "--state";
  }
  if (f.branch) {
    cfg.branch = parse_branch(*f.branch, "--branch");
    cfg.origin["branch"] = "--branch";
  }
  if (f.mode) {
    cfg.mode = parse_mode(*f.mode, "--mode");
    cfg.origin["mode"] = "--mode";
  }
  if (f.format) cfg.format = parse_format(*f.format, "--format");
  if (f.out) cfg.out = *f.out;
  for (const auto& item : f.tol) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::kConfig, "fcs_cli", "invalid value for '--tol': expected name=value, got '" + item + "'");
    }
    const std::string name = item.substr(0, eq);
    const fcs::Complex v = parse_complex(item.substr(eq + 1));
    if (v.imag() != 0.0 || !(v.real() > 0.0)) {
      throw Error(ErrorKind::kConfig, "fcs_cli", "invalid value for '--tol " + name + "': must be positive");
    }
    tolerance_ref(cfg.tolerances, name) = v.real();
  }
  return cfg;
}

void emit(const fcs::RunConfig& cfg, const std::string& text) {
  if (cfg.out.empty()) {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream os(cfg.out, std::ios::binary);
  if (!os) throw fcs::Error(fcs::ErrorKind::kConfig, "fcs_cli", "cannot write output file '" + cfg.out + "'");
  os << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Full counting statistics of the twisted XXX chain"};
  app.require_subcommand(1);
  Flags fcs_flags, spectrum_flags, verify_flags;
  auto* fcs_cmd = app.add_subcommand("fcs", "FCS table for the configured state");
  auto* spectrum_cmd = app.add_subcommand("spectrum", "Bethe lines of K and K~");
  auto* verify_cmd = app.add_subcommand("verify", "invariant groups against the operator oracle");
  add_flags(fcs_cmd, fcs_flags);
  add_flags(spectrum_cmd, spectrum_flags);
  add_flags(verify_cmd, verify_flags);
  CLI11_PARSE(app, argc, argv);

  const auto start = std::chrono::steady_clock::now();
  int code = 0;
  try {
    if (fcs_cmd->parsed()) {
      const auto cfg = build_config(fcs_flags);
      const auto report = fcs::run_fcs(cfg);
      emit(cfg, fcs::render(report, cfg.format));
      if (!report.passed()) code = 1;
    } else if (spectrum_cmd->parsed()) {
      const auto cfg = build_config(spectrum_flags);
      emit(cfg, fcs::render(fcs::run_spectrum(cfg), cfg.format));
    } else {
      auto cfg = build_config(verify_flags);
      cfg.mode = fcs::Mode::kVerify;
      const auto report = fcs::run_verify(cfg);
      emit(cfg, fcs::render(report, cfg.format));
      if (!report.passed()) {
        std::cerr << "verification failed\n";
        code = 1;
      }
    }
  } catch (const fcs::Error& e) {
    std::cerr << fcs::error_record(e).dump() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << fcs::error_record(e).dump() << "\n";
    return 2;
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::fprintf(stderr, "elapsed_s %.3f\n", elapsed);
  return code;
}
