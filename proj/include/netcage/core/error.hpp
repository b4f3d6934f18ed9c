#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace netcage {

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  NotPositiveDefinite,
  FitFailure,
  DegenerateData,
  NestedViolation,
  EmptyLevel,
  LevelOrder,
  InvalidSampleCount,
  InconsistentNodeCount,
  EmptyScenario,
  AllZeroVariance,
  NumericalFailure,
  InvalidGeometry,
  NoConvergence,
  InvalidParams,
  InvalidRange,
  InvalidSensorIndex,
  AsymmetricInput,
  Divergence,
  EmptyDataset,
  UnreadableSource,
  SchemaViolation,
  ModelMissing,
  InsufficientHfData,
  LengthMismatch,
  CorruptBundle,
  VersionUnsupported,
  NonFiniteOutput,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Process exit status for an error: 2 for data problems, 3 for numerical failures.
int exit_status(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void raise(ErrorCode code, const std::string& what);

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) raise(code, what);
}

}  // namespace netcage
