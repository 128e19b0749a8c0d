#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace soh {

/// Every failure the library can signal. The CLI maps these onto exit codes.
enum class ErrorCode {
  // configuration / input
  ParseError,
  UnknownKey,
  RangeError,
  InvalidArgument,
  Io,
  SchemaMismatch,
  // numerical failures
  DegreeMismatch,
  SolveFailed,
  DegenerateDenominator,
  NonIntegrableKernel,
  EigensolveFailed,
  KappaOutOfRange,
  CflViolation,
  FitFailed,
  // invariant violations
  PoleSingular,
  PoleGaugeExceeded,
  DegenerateCurrent,
  NegativeMass,
  TimeMismatch,
  ConstraintViolation,
  InvariantViolation,
};

std::string_view error_code_name(ErrorCode code) noexcept;

/// 2 = configuration error, 3 = numeric failure, 4 = invariant violation.
int exit_status_for(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace soh
