#include "netcage/core/error.hpp"

namespace netcage {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::FitFailure: return "FitFailure";
    case ErrorCode::DegenerateData: return "DegenerateData";
    case ErrorCode::NestedViolation: return "NestedViolation";
    case ErrorCode::EmptyLevel: return "EmptyLevel";
    case ErrorCode::LevelOrder: return "LevelOrder";
    case ErrorCode::InvalidSampleCount: return "InvalidSampleCount";
    case ErrorCode::InconsistentNodeCount: return "InconsistentNodeCount";
    case ErrorCode::EmptyScenario: return "EmptyScenario";
    case ErrorCode::AllZeroVariance: return "AllZeroVariance";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::InvalidGeometry: return "InvalidGeometry";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::InvalidRange: return "InvalidRange";
    case ErrorCode::InvalidSensorIndex: return "InvalidSensorIndex";
    case ErrorCode::AsymmetricInput: return "AsymmetricInput";
    case ErrorCode::Divergence: return "Divergence";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::UnreadableSource: return "UnreadableSource";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::ModelMissing: return "ModelMissing";
    case ErrorCode::InsufficientHfData: return "InsufficientHfData";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::CorruptBundle: return "CorruptBundle";
    case ErrorCode::VersionUnsupported: return "VersionUnsupported";
    case ErrorCode::NonFiniteOutput: return "NonFiniteOutput";
  }
  return "Unknown";
}

int exit_status(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NotPositiveDefinite:
    case ErrorCode::FitFailure:
    case ErrorCode::NumericalFailure:
    case ErrorCode::NoConvergence:
    case ErrorCode::Divergence:
    case ErrorCode::NonFiniteOutput:
      return 3;
    default:
      return 2;
  }
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void raise(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace netcage
