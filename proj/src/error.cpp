#include "fcs/error.hpp"

namespace fcs {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid-argument";
    case ErrorKind::kDimension: return "dimension";
    case ErrorKind::kSingular: return "singular";
    case ErrorKind::kNonGeneric: return "non-generic";
    case ErrorKind::kLinkingUnsolvable: return "linking-unsolvable";
    case ErrorKind::kTqInconsistent: return "tq-inconsistent";
    case ErrorKind::kNotOnShell: return "not-on-shell";
    case ErrorKind::kCollision: return "collision";
    case ErrorKind::kConfig: return "config";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, std::string module, const std::string& message)
    : std::runtime_error(module + ": " + message), kind_(kind), module_(std::move(module)) {}

}  // namespace fcs
