#include "ntz/error.hpp"

namespace ntz {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NegativeTime: return "NegativeTime";
    case ErrorCode::NotConcave: return "NotConcave";
    case ErrorCode::SlopeOutOfRange: return "SlopeOutOfRange";
    case ErrorCode::InterceptOutOfRange: return "InterceptOutOfRange";
    case ErrorCode::NoTangent: return "NoTangent";
    case ErrorCode::NonPositiveRisk: return "NonPositiveRisk";
    case ErrorCode::NonPositiveTau: return "NonPositiveTau";
    case ErrorCode::MismatchedGrid: return "MismatchedGrid";
    case ErrorCode::BoundaryTermTooLarge: return "BoundaryTermTooLarge";
    case ErrorCode::NegativeWeight: return "NegativeWeight";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::DegenerateZone: return "DegenerateZone";
    case ErrorCode::NonPositiveInput: return "NonPositiveInput";
  }
  return "Unknown";
}

}  // namespace ntz
