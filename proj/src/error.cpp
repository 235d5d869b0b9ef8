#include "freezing/error.hpp"

namespace freezing {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NegativeOffDiagonal: return "NegativeOffDiagonal";
    case ErrorCode::RowSumOutOfRange: return "RowSumOutOfRange";
    case ErrorCode::Decomposable: return "Decomposable";
    case ErrorCode::NotIrreducible: return "NotIrreducible";
    case ErrorCode::SingularBeyondNullSpace: return "SingularBeyondNullSpace";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::IndexBelowStart: return "IndexBelowStart";
    case ErrorCode::InvalidRow: return "InvalidRow";
    case ErrorCode::RemainderBoundViolated: return "RemainderBoundViolated";
    case ErrorCode::UnsupportedRegime: return "UnsupportedRegime";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::BoundaryTooClose: return "BoundaryTooClose";
    case ErrorCode::NonPositiveDistance: return "NonPositiveDistance";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace freezing
