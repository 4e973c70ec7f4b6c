// SPDX-License-Identifier: Apache-2.0

#include "soilrange/error.hpp"

namespace soilrange {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MissingField: return "MissingField";
    case ErrorCode::InvalidValue: return "InvalidValue";
    case ErrorCode::NonOrthonormalRotation: return "NonOrthonormalRotation";
    case ErrorCode::OutOfRangePrincipalPoint: return "OutOfRangePrincipalPoint";
    case ErrorCode::NonPositiveDepth: return "NonPositiveDepth";
    case ErrorCode::PointBehindCamera: return "PointBehindCamera";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::RangeExceeded: return "RangeExceeded";
    case ErrorCode::RoiOutOfBounds: return "RoiOutOfBounds";
    case ErrorCode::DegenerateCalibration: return "DegenerateCalibration";
    case ErrorCode::UnorderedTimestamps: return "UnorderedTimestamps";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::SpecOutOfRange: return "SpecOutOfRange";
    case ErrorCode::SourceExhausted: return "SourceExhausted";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::PairingError: return "PairingError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, std::string message, std::string field)
    : std::runtime_error(std::string(to_string(code)) + ": " + message +
                         (field.empty() ? std::string{} : " [" + field + "]")),
      code_(code),
      message_(std::move(message)),
      field_(std::move(field)) {}

}  // namespace soilrange
