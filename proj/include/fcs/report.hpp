#pragma once

// Command pipelines (fcs, spectrum) and their CSV/JSON serialisation.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fcs/bethe.hpp"
#include "fcs/config.hpp"
#include "fcs/error.hpp"

namespace fcs {

struct FcsRow {
  int ell = 0;
  Complex value;
  std::optional<Complex> oracle;  // verify mode only
  double abs_err = 0.0;
  double rel_err = 0.0;
};

struct FcsTable {
  std::optional<int> branch;  // absent in oracle mode
  std::size_t state_index = 0;
  std::size_t lines = 0;
  std::size_t admissible = 0;
  Complex rho1, rho2;
  std::vector<FcsRow> rows;
  std::vector<std::string> warnings;

  double max_rel_err() const;
};

struct FcsReport {
  RunConfig config;
  std::vector<FcsTable> tables;
  std::optional<double> max_branch_deviation;  // branch=both
  double tolerance = 0.0;                      // verify mode pass threshold

  // Verify mode: every row within tolerance (and branches agree).
  bool passed() const;
};

FcsReport run_fcs(const RunConfig& cfg);

// One side (K or K~) of one rho branch.
struct SpectrumSide {
  std::string name;  // "K" or "K_tilde"
  int branch = 0;
  Twist twist;
  Complex rho1, rho2, mu;
  std::vector<SpectralLine> lines;
};

struct SpectrumReport {
  RunConfig config;
  std::vector<SpectrumSide> sides;
};

SpectrumReport run_spectrum(const RunConfig& cfg);

// 17 significant digits, so values survive a text round trip exactly.
std::string format_double(double x);

nlohmann::json config_json(const RunConfig& cfg);
nlohmann::json complex_json(Complex z);
Complex complex_from_json(const nlohmann::json& j);

nlohmann::json to_json(const FcsReport& report);
std::string to_csv(const FcsReport& report);
std::string render(const FcsReport& report, Format format);

nlohmann::json line_to_json(const SpectralLine& line);
SpectralLine line_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SpectrumReport& report);
std::string to_csv(const SpectrumReport& report);
std::string render(const SpectrumReport& report, Format format);

// {"error": {"module": ..., "kind": ..., "message": ...}}
nlohmann::json error_record(const Error& e);
nlohmann::json error_record(const std::exception& e);

}  // namespace fcs
