#include "thirdq/error.hpp"

namespace thirdq {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::ResourceLimit: return "ResourceLimit";
    case ErrorCode::NonSymmetricInput: return "NonSymmetricInput";
    case ErrorCode::PairingFailure: return "PairingFailure";
    case ErrorCode::SingularInput: return "SingularInput";
    case ErrorCode::BranchCutFailure: return "BranchCutFailure";
    case ErrorCode::NotDiagonalizable: return "NotDiagonalizable";
    case ErrorCode::ResidualFailure: return "ResidualFailure";
    case ErrorCode::UnsupportedJordanStructure: return "UnsupportedJordanStructure";
    case ErrorCode::GaugeFixFailure: return "GaugeFixFailure";
    case ErrorCode::DriveAtCriticalMode: return "DriveAtCriticalMode";
    case ErrorCode::JordanWithDrive: return "JordanWithDrive";
    case ErrorCode::JordanFormRequiresGeneralizedTreatment:
      return "JordanFormRequiresGeneralizedTreatment";
    case ErrorCode::BranchCollision: return "BranchCollision";
    case ErrorCode::NonDiagonalizableOnPath: return "NonDiagonalizableOnPath";
    case ErrorCode::OffGrid: return "OffGrid";
    case ErrorCode::InsufficientGrid: return "InsufficientGrid";
    case ErrorCode::OracleMismatch: return "OracleMismatch";
  }
  return "Unknown";
}

bool is_input_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::IndexOutOfRange:
    case ErrorCode::ResourceLimit:
      return true;
    default:
      return false;
  }
}

}  // namespace thirdq
