#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace homocurve {

/// Named failure conditions. The string form is module-qualified
/// ("lie_group.AngleAmbiguity") and is what the CLI prints.
enum class ErrorKind {
  DimensionMismatch,
  NotARotation,
  AngleAmbiguity,
  YNotInK,
  AntipodalPoints,
  ConsecutiveSamplesAtCutLocus,
  GridMismatch,
  NonMonotone,
  DegenerateSpeed,
  NotAUnitVector,
  NoConvergence,
  EmptyEnsemble,
  IndexOutOfRange,
  InvalidArgument,
  MalformedHeader,
  MalformedFix,
  CountMismatch,
  OutOfRange,
  DegenerateTrack,
  TooFewFixes,
  SchemaViolation,
  IoError,
  UsageError,
};

std::string_view error_name(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(error_name(kind)) + ": " + what), kind_(kind), detail_(what) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// Message without the error-name prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace homocurve
