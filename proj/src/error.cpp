#include "wmsim/error.hpp"

namespace wmsim {

const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::UnsupportedState: return "unsupported-state";
    case ErrorKind::AmbiguousRegime: return "ambiguous-regime";
    case ErrorKind::DegenerateContrast: return "degenerate-contrast";
    case ErrorKind::FitFailure: return "fit-failure";
    case ErrorKind::Amplification: return "amplification";
    case ErrorKind::ConfigError: return "config-error";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, std::string module, const std::string& msg)
    : std::runtime_error("[" + module + "] " + to_string(kind) + ": " + msg),
      kind_(kind),
      module_(std::move(module)) {}

}  // namespace wmsim
