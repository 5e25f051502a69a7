#pragma once

// Self-check of the whole pipeline at the configured size: every invariant
// group is measured against the operator oracle and judged by the configured
// tolerances.

#include <string>
#include <vector>

#include <json.hpp>

#include "fcs/config.hpp"

namespace fcs {

struct CheckResult {
  std::string group;
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string note;  // failure reason or sampling remark
};

struct VerifyReport {
  RunConfig config;
  std::vector<CheckResult> checks;
  // fitted H_logderiv = alpha H_boundary + delta I
  Complex alpha, delta;

  bool passed() const;
};

VerifyReport run_verify(const RunConfig& cfg);

nlohmann::json to_json(const VerifyReport& report);
std::string to_csv(const VerifyReport& report);
std::string render(const VerifyReport& report, Format format);

}  // namespace fcs
