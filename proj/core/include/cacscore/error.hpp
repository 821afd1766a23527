// Copyright 2026 The cacscore Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cacscore {

enum class ErrorCode {
  kUnsupportedTransferSyntax,
  kMissingRequiredTag,
  kMalformedElement,
  kInconsistentGeometry,
  kDuplicatePosition,
  kLengthMismatch,
  kInvalidManifest,
  kShapeMismatch,
  kRoiOutOfBounds,
  kUnknownComponent,
  kVoxelOutOfBounds,
  kLesionVolumeMismatch,
  kNegativeScore,
  kInvalidConfig,
  kEmpty,
  kNoAnnotatedSlices,
  kMissingFixture,
  kNoGroundTruth,
  kProviderFailure,
  kIoError,
  kInvalidArgument,
  kRevisionConflict,
  kUnknownStudy,
  kSliceOutOfRange,
};

/// Stable snake_case identifier used in structured error records.
std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// front ends (CLI exit codes, HTTP statuses) can map it without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised when a computed result breaks one of its own invariants.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace cacscore
