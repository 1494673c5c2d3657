#include "sfw/error.hpp"

namespace sfw {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kOutOfBounds: return "OutOfBounds";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kMalformedFile: return "MalformedFile";
    case ErrorCode::kIoFailure: return "IoFailure";
    case ErrorCode::kSourceInsideWall: return "SourceInsideWall";
    case ErrorCode::kInvalidKGrid: return "InvalidKGrid";
    case ErrorCode::kEmptyTrace: return "EmptyTrace";
    case ErrorCode::kInvalidWindow: return "InvalidWindow";
    case ErrorCode::kTooFewSamples: return "TooFewSamples";
    case ErrorCode::kDegenerateClusters: return "DegenerateClusters";
    case ErrorCode::kNotDescending: return "NotDescending";
    case ErrorCode::kEmptyTrajectory: return "EmptyTrajectory";
    case ErrorCode::kRouterOutOfBounds: return "RouterOutOfBounds";
    case ErrorCode::kDegenerateRay: return "DegenerateRay";
    case ErrorCode::kEmptySegment: return "EmptySegment";
    case ErrorCode::kNonpositiveSigma: return "NonpositiveSigma";
    case ErrorCode::kRouterInsideWall: return "RouterInsideWall";
    case ErrorCode::kTrajectoryThroughWall: return "TrajectoryThroughWall";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kUnsupportedGridKind: return "UnsupportedGridKind";
  }
  return "Unknown";
}

}  // namespace sfw
