#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace betaexp {

enum class ErrorKind {
  InvalidArgument,
  InvalidPoint,
  NoRootFound,
  CapExceeded,
  MemoryGuard,
  Unreachable,
  ContainmentViolation,
  NoSteeringWord,
  OutOfDomain,
  DepthExceeded,
  Unstable,
  OracleMismatch,
  AuditFailure,
};

std::string_view to_string(ErrorKind kind);

/// True for failures that mean a mathematical invariant did not hold (as opposed to a
/// caller supplying an argument outside the documented range).
bool is_invariant_violation(ErrorKind kind);

class BetaError : public std::runtime_error {
 public:
  BetaError(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace betaexp
