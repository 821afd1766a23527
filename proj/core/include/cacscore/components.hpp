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

#include <cstdint>
#include <string_view>
#include <vector>

#include "cacscore/mask.hpp"

namespace cacscore {

enum class InPlaneConnectivity { kFour, kEight };

/// none: each slice labeled on its own. face: neighbours directly above and
/// below. full: all nine voxels of the adjacent slices.
enum class CrossSliceConnectivity { kNone, kFace, kFull };

/// The voxel neighbourhood used for labeling. {four, face} is the
/// 6-neighbourhood and {eight, full} the 26-neighbourhood.
struct Connectivity {
  InPlaneConnectivity in_plane = InPlaneConnectivity::kEight;
  CrossSliceConnectivity cross_slice = CrossSliceConnectivity::kFull;

  [[nodiscard]] bool is_2d() const {
    return cross_slice == CrossSliceConnectivity::kNone;
  }
  /// Whether the offset (ds, dr, dc), each in {-1, 0, 1} and not all zero,
  /// joins two voxels.
  [[nodiscard]] bool connects(int ds, int dr, int dc) const;

  friend bool operator==(const Connectivity&, const Connectivity&) = default;
};

[[nodiscard]] std::string_view to_string(InPlaneConnectivity value);
[[nodiscard]] std::string_view to_string(CrossSliceConnectivity value);
/// Accepts "four"/"4" and "eight"/"8"; throws kInvalidConfig otherwise.
[[nodiscard]] InPlaneConnectivity parse_in_plane(std::string_view text);
[[nodiscard]] CrossSliceConnectivity parse_cross_slice(std::string_view text);

struct LabelGrid {
  Shape shape;
  // 0 for background, 1..count otherwise.
  std::vector<std::uint32_t> labels;
  std::uint32_t count = 0;

  [[nodiscard]] std::uint32_t at(std::size_t s, std::size_t r,
                                 std::size_t c) const {
    return labels[shape.index(s, r, c)];
  }
};

/// Two-pass union-find labeling. Labels are assigned in first-encounter scan
/// order (slice, then row, then col).
[[nodiscard]] LabelGrid label_components(const BinaryMask& mask,
                                         Connectivity conn);

}  // namespace cacscore
