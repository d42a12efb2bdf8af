#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace phaseportrait {

enum class ErrorKind {
  configuration,
  validation,
  numerical,
  usage,
  io,
};

std::string_view to_string(ErrorKind kind);

/// Error raised by every module. Carries the module name and, when known,
/// the offending input location (file:row, year, step index, ...).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string module, const std::string& message,
        std::string location = {});

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& module() const noexcept { return module_; }
  const std::string& location() const noexcept { return location_; }

 private:
  ErrorKind kind_;
  std::string module_;
  std::string location_;
};

}  // namespace phaseportrait
