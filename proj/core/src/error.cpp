#include "satpin/error.hpp"

namespace satpin {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kPrecondition: return "precondition";
    case ErrorKind::kSingular: return "singular";
    case ErrorKind::kDivergence: return "divergence";
    case ErrorKind::kDegenerate: return "degenerate";
    case ErrorKind::kIllConditioned: return "ill-conditioned";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kUsage: return "usage";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message, double value)
    : std::runtime_error(message), kind_(kind), value_(value) {}

void fail(ErrorKind kind, const std::string& message, double value) {
  throw Error(kind, message, value);
}

}  // namespace satpin
