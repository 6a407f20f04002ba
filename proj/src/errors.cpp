#include "betaexp/errors.hpp"

namespace betaexp {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InvalidPoint: return "InvalidPoint";
    case ErrorKind::NoRootFound: return "NoRootFound";
    case ErrorKind::CapExceeded: return "CapExceeded";
    case ErrorKind::MemoryGuard: return "MemoryGuard";
    case ErrorKind::Unreachable: return "Unreachable";
    case ErrorKind::ContainmentViolation: return "ContainmentViolation";
    case ErrorKind::NoSteeringWord: return "NoSteeringWord";
    case ErrorKind::OutOfDomain: return "OutOfDomain";
    case ErrorKind::DepthExceeded: return "DepthExceeded";
    case ErrorKind::Unstable: return "Unstable";
    case ErrorKind::OracleMismatch: return "OracleMismatch";
    case ErrorKind::AuditFailure: return "AuditFailure";
  }
  return "Unknown";
}

bool is_invariant_violation(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NoRootFound:
    case ErrorKind::Unreachable:
    case ErrorKind::ContainmentViolation:
    case ErrorKind::NoSteeringWord:
    case ErrorKind::OracleMismatch:
    case ErrorKind::AuditFailure:
      return true;
    default:
      return false;
  }
}

}  // namespace betaexp
