#pragma once

#include <stdexcept>
#include <string>

namespace wmsim {

enum class ErrorKind {
  InvalidArgument,
  UnsupportedState,
  AmbiguousRegime,
  DegenerateContrast,
  FitFailure,
  Amplification,
  ConfigError,
};

const char* to_string(ErrorKind k);

/// Library error carrying a kind and the tag of the module that raised it.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string module, const std::string& msg);

  ErrorKind kind() const { return kind_; }
  const std::string& module() const { return module_; }

 private:
  ErrorKind kind_;
  std::string module_;
};

}  // namespace wmsim
