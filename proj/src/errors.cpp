#include "homocurve/errors.hpp"

namespace homocurve {

std::string_view error_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DimensionMismatch: return "lie_group.DimensionMismatch";
    case ErrorKind::NotARotation: return "lie_group.NotARotation";
    case ErrorKind::AngleAmbiguity: return "lie_group.AngleAmbiguity";
    case ErrorKind::YNotInK: return "lie_group.YNotInK";
    case ErrorKind::AntipodalPoints: return "lie_group.AntipodalPoints";
    case ErrorKind::ConsecutiveSamplesAtCutLocus: return "srv_core.ConsecutiveSamplesAtCutLocus";
    case ErrorKind::GridMismatch: return "srv_core.GridMismatch";
    case ErrorKind::NonMonotone: return "alignment.NonMonotone";
    case ErrorKind::DegenerateSpeed: return "srv_core.DegenerateSpeed";
    case ErrorKind::NotAUnitVector: return "homogeneous.NotAUnitVector";
    case ErrorKind::NoConvergence: return "homogeneous.NoConvergence";
    case ErrorKind::EmptyEnsemble: return "statistics.EmptyEnsemble";
    case ErrorKind::IndexOutOfRange: return "statistics.IndexOutOfRange";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::MalformedHeader: return "data_io.MalformedHeader";
    case ErrorKind::MalformedFix: return "data_io.MalformedFix";
    case ErrorKind::CountMismatch: return "data_io.CountMismatch";
    case ErrorKind::OutOfRange: return "data_io.OutOfRange";
    case ErrorKind::DegenerateTrack: return "data_io.DegenerateTrack";
    case ErrorKind::TooFewFixes: return "data_io.TooFewFixes";
    case ErrorKind::SchemaViolation: return "data_io.SchemaViolation";
    case ErrorKind::IoError: return "data_io.IoError";
    case ErrorKind::UsageError: return "cli.UsageError";
  }
  return "Unknown";
}

}  // namespace homocurve
