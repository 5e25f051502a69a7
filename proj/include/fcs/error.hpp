#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fcs {

enum class ErrorKind {
  kInvalidArgument,
  kDimension,
  kSingular,
  kNonGeneric,
  kLinkingUnsolvable,
  kTqInconsistent,
  kNotOnShell,
  kCollision,
  kConfig,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries the module it came from, so the
// CLI can report provenance in its structured error record.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string module, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& module() const noexcept { return module_; }

 private:
  ErrorKind kind_;
  std::string module_;
};

}  // namespace fcs
