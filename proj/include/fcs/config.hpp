#pragma once

// Run configuration for the command-line front end: YAML file plus flag
// overrides, validated before any computation.

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "fcs/numkernel.hpp"
#include "fcs/spin_oracle.hpp"
#include "fcs/twist.hpp"

namespace fcs {

enum class Mode { kMaba, kOracle, kVerify };
enum class Format { kCsv, kJson };
enum class BranchChoice { kFirst, kSecond, kBoth };

std::string_view to_string(Mode m);
std::string_view to_string(Format f);
std::string_view to_string(BranchChoice b);

// Pass thresholds of the verify groups. fcs <= 0 means "size dependent":
// 1e-8 up to L = 6, 1e-6 above.
struct Tolerances {
  double fcs = 0.0;
  double sum_rule = 1e-9;
  double bethe_residual = 1e-10;
  double tq_residual = 1e-8;
  double lambda = 1e-8;
  double overlap = 1e-8;
  double term = 1e-8;
  double jacobian = 1e-6;
  double inverse = 1e-10;
  double commuting = 1e-11;
  double resolution = 1e-9;
  double branch = 1e-9;
  double hamiltonian = 1e-10;
  double affine = 1e-9;

  double fcs_for(int length) const;
};

// Tolerance names as used in config files and --tol.
std::vector<std::string> tolerance_names();
double& tolerance_ref(Tolerances& t, std::string_view name);

struct RunConfig {
  ChainConfig chain;
  Twist twist = Twist::sigma_x();
  Beta beta{Complex(1.0), Complex(0.0), Complex(1.0)};
  std::vector<int> ells;  // empty: 0..L
  std::size_t state = 0;  // rank in the energy ordering
  BranchChoice branch = BranchChoice::kFirst;
  Mode mode = Mode::kMaba;
  Format format = Format::kCsv;
  std::string out;  // empty: stdout
  Tolerances tolerances;

  // Where each key came from ("file.yaml:12" or "--length"), for error messages.
  std::map<std::string, std::string> origin;

  std::vector<int> ell_list() const;
  // Raises kConfig naming the key and its origin.
  void validate() const;
};

RunConfig parse_config(const std::string& text, const std::string& source);
RunConfig load_config(const std::string& path);

// Flag values. A complex token is a real number, an imaginary number ("2i",
// "-i") or a sum of both ("1-0.5i").
Complex parse_complex(std::string_view token);
std::vector<Complex> parse_complex_list(std::string_view text, std::size_t expected, const std::string& key);
// "a..b" (inclusive) or a comma list.
std::vector<int> parse_ell_spec(std::string_view text, const std::string& key);
Mode parse_mode(std::string_view text, const std::string& key, const std::string& where = {});
Format parse_format(std::string_view text, const std::string& key, const std::string& where = {});
BranchChoice parse_branch(std::string_view text, const std::string& key, const std::string& where = {});

}  // namespace fcs
