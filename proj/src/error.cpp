#include "specinv/error.hpp"

namespace specinv {

std::string_view error_name(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NoBoundState: return "NoBoundState";
    case ErrorKind::DomainTooSmall: return "DomainTooSmall";
    case ErrorKind::BelowCritical: return "BelowCritical";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::NonConvergent: return "NonConvergent";
    case ErrorKind::DegenerateFit: return "DegenerateFit";
    case ErrorKind::OutOfValidatedRange: return "OutOfValidatedRange";
    case ErrorKind::NonMonotone: return "NonMonotone";
    case ErrorKind::MinimizerAtBoundary: return "MinimizerAtBoundary";
    case ErrorKind::MaximizerAtBoundary: return "MaximizerAtBoundary";
    case ErrorKind::UnsupportedShape: return "UnsupportedShape";
    case ErrorKind::NoBracket: return "NoBracket";
    case ErrorKind::KineticRangeExceeded: return "KineticRangeExceeded";
    case ErrorKind::InvalidData: return "InvalidData";
  }
  return "Unknown";
}

}  // namespace specinv
