#include "lyapcert/types.hpp"

namespace lyapcert {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyTarget: return "EmptyTarget";
    case ErrorCode::kEmptyRegion: return "EmptyRegion";
    case ErrorCode::kNotStrictSubset: return "NotStrictSubset";
    case ErrorCode::kNonpositiveResult: return "NonpositiveResult";
    case ErrorCode::kEmptyAnnulus: return "EmptyAnnulus";
    case ErrorCode::kNonpositiveLevel: return "NonpositiveLevel";
    case ErrorCode::kStepTooLarge: return "StepTooLarge";
    case ErrorCode::kLeftDomain: return "LeftDomain";
    case ErrorCode::kTooManyKinks: return "TooManyKinks";
    case ErrorCode::kUnknownFamily: return "UnknownFamily";
    case ErrorCode::kUnsupportedFamily: return "UnsupportedFamily";
    case ErrorCode::kPreconditionFailed: return "PreconditionFailed";
    case ErrorCode::kSchemaMismatch: return "SchemaMismatch";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

}  // namespace lyapcert
