#pragma once

#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace satpin {

// Failure categories. The CLI prints the category name verbatim, so keep the
// strings returned by to_string() stable.
enum class ErrorKind {
  kParse,
  kPrecondition,
  kSingular,
  kDivergence,
  kDegenerate,
  kIllConditioned,
  kIo,
  kUsage,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message,
        double value = std::numeric_limits<double>::quiet_NaN());

  ErrorKind kind() const noexcept { return kind_; }

  // Numeric payload: last residual for divergence, singular-value ratio for
  // ill-conditioning. NaN when not applicable.
  double value() const noexcept { return value_; }

 private:
  ErrorKind kind_;
  double value_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message,
                       double value = std::numeric_limits<double>::quiet_NaN());

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) fail(kind, message);
}

}  // namespace satpin
