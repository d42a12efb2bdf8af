#include "phaseportrait/error.hpp"

namespace phaseportrait {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::configuration: return "configuration";
    case ErrorKind::validation: return "validation";
    case ErrorKind::numerical: return "numerical";
    case ErrorKind::usage: return "usage";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, std::string module, const std::string& message,
             std::string location)
    : std::runtime_error(message),
      kind_(kind),
      module_(std::move(module)),
      location_(std::move(location)) {}

}  // namespace phaseportrait
