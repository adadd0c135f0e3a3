#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace specinv {

enum class ErrorKind {
  InvalidArgument,
  NoBoundState,
  DomainTooSmall,
  BelowCritical,
  OutOfRange,
  NonConvergent,
  DegenerateFit,
  OutOfValidatedRange,
  NonMonotone,
  MinimizerAtBoundary,
  MaximizerAtBoundary,
  UnsupportedShape,
  NoBracket,
  KineticRangeExceeded,
  InvalidData,
};

std::string_view error_name(ErrorKind kind) noexcept;

/// Every failure raised by the library carries one of the named kinds above;
/// the CLI prints `name()` on standard error.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(error_name(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::string_view name() const noexcept { return error_name(kind_); }

 private:
  ErrorKind kind_;
};

}  // namespace specinv
