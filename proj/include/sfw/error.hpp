#ifndef SFW_ERROR_HPP_
#define SFW_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace sfw {

enum class ErrorCode {
  kOutOfBounds,
  kInvalidArgument,
  kMalformedFile,
  kIoFailure,
  kSourceInsideWall,
  kInvalidKGrid,
  kEmptyTrace,
  kInvalidWindow,
  kTooFewSamples,
  kDegenerateClusters,
  kNotDescending,
  kEmptyTrajectory,
  kRouterOutOfBounds,
  kDegenerateRay,
  kEmptySegment,
  kNonpositiveSigma,
  kRouterInsideWall,
  kTrajectoryThroughWall,
  kDimensionMismatch,
  kUnsupportedGridKind,
};

std::string_view error_code_name(ErrorCode code);

// All library failures are reported through this type. what() carries the
// human-readable detail; code() is stable and used for machine-parsable CLI
// output.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace sfw

#endif  // SFW_ERROR_HPP_
