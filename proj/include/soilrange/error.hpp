// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace soilrange {

enum class ErrorCode {
  MissingField,
  InvalidValue,
  NonOrthonormalRotation,
  OutOfRangePrincipalPoint,
  NonPositiveDepth,
  PointBehindCamera,
  DimensionMismatch,
  RangeExceeded,
  RoiOutOfBounds,
  DegenerateCalibration,
  UnorderedTimestamps,
  InsufficientData,
  SpecOutOfRange,
  SourceExhausted,
  ConfigInvalid,
  PairingError,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every library failure surfaces as this exception. `field()` names the
/// offending config key, file or argument when there is one.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, std::string field = {});

  ErrorCode code() const noexcept { return code_; }
  const std::string& field() const noexcept { return field_; }
  /// Message without the code prefix and field suffix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
  std::string field_;
};

}  // namespace soilrange
