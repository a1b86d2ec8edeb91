#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace thirdq {

enum class ErrorCode {
  // input errors
  InvalidInput,
  DimensionMismatch,
  IndexOutOfRange,
  ResourceLimit,
  // computational errors
  NonSymmetricInput,
  PairingFailure,
  SingularInput,
  BranchCutFailure,
  NotDiagonalizable,
  ResidualFailure,
  UnsupportedJordanStructure,
  GaugeFixFailure,
  DriveAtCriticalMode,
  JordanWithDrive,
  JordanFormRequiresGeneralizedTreatment,
  BranchCollision,
  NonDiagonalizableOnPath,
  OffGrid,
  InsufficientGrid,
  OracleMismatch,
};

std::string_view to_string(ErrorCode code);

/// True for codes caused by malformed or out-of-range user input (CLI exit 2).
bool is_input_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, std::string context = {})
      : std::runtime_error(std::move(message)), code_(code), context_(std::move(context)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& context() const noexcept { return context_; }

 private:
  ErrorCode code_;
  std::string context_;
};

}  // namespace thirdq
