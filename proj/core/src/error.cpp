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

#include "cacscore/error.hpp"

namespace cacscore {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnsupportedTransferSyntax: return "unsupported_transfer_syntax";
    case ErrorCode::kMissingRequiredTag: return "missing_required_tag";
    case ErrorCode::kMalformedElement: return "malformed_element";
    case ErrorCode::kInconsistentGeometry: return "inconsistent_geometry";
    case ErrorCode::kDuplicatePosition: return "duplicate_position";
    case ErrorCode::kLengthMismatch: return "length_mismatch";
    case ErrorCode::kInvalidManifest: return "invalid_manifest";
    case ErrorCode::kShapeMismatch: return "shape_mismatch";
    case ErrorCode::kRoiOutOfBounds: return "roi_out_of_bounds";
    case ErrorCode::kUnknownComponent: return "unknown_component";
    case ErrorCode::kVoxelOutOfBounds: return "voxel_out_of_bounds";
    case ErrorCode::kLesionVolumeMismatch: return "lesion_volume_mismatch";
    case ErrorCode::kNegativeScore: return "negative_score";
    case ErrorCode::kInvalidConfig: return "invalid_config";
    case ErrorCode::kEmpty: return "empty";
    case ErrorCode::kNoAnnotatedSlices: return "no_annotated_slices";
    case ErrorCode::kMissingFixture: return "missing_fixture";
    case ErrorCode::kNoGroundTruth: return "no_ground_truth";
    case ErrorCode::kProviderFailure: return "provider_failure";
    case ErrorCode::kIoError: return "io_error";
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kRevisionConflict: return "revision_conflict";
    case ErrorCode::kUnknownStudy: return "unknown_study";
    case ErrorCode::kSliceOutOfRange: return "slice_out_of_range";
  }
  return "unknown";
}

}  // namespace cacscore
