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
#include <map>
#include <optional>
#include <variant>
#include <vector>

#include "cacscore/components.hpp"
#include "cacscore/mask.hpp"
#include "cacscore/volume.hpp"

namespace cacscore {

inline constexpr double kDefaultHuThreshold = 130.0;
inline constexpr double kDefaultMinComponentAreaMm2 = 1.0;

/// One connected calcified component.
struct Lesion {
  // Label from label_components() under the extraction connectivity.
  std::uint32_t id = 0;
  std::vector<VoxelIndex> voxels;
  std::map<long, double> per_slice_area_mm2;
  std::map<long, std::int16_t> per_slice_max_hu;
  std::int16_t max_hu = 0;
  double total_area_mm2 = 0.0;
  VoxelBox bounding_box;

  [[nodiscard]] long first_slice() const { return bounding_box.begin.slice; }
  [[nodiscard]] long last_slice() const { return bounding_box.end.slice - 1; }
};

/// Labels the mask and builds lesions. A component's voxels on a slice whose
/// in-plane area is below `min_component_area_mm2` are dropped (in 2D mode
/// this drops whole components); components left empty are omitted.
[[nodiscard]] std::vector<Lesion> extract_lesions(const Volume& volume,
                                                  const BinaryMask& mask,
                                                  Connectivity conn,
                                                  double min_component_area_mm2);

/// Rule-based mask: HU >= threshold inside `roi` (whole volume by default).
[[nodiscard]] BinaryMask threshold_segment(const Volume& volume,
                                           double hu_threshold,
                                           std::optional<VoxelBox> roi = {});

struct RemoveComponent {
  std::uint32_t id = 0;
  Connectivity connectivity;
};

struct Paint {
  std::vector<VoxelIndex> voxels;
  bool value = true;
};

using MaskEdit = std::variant<RemoveComponent, Paint>;

/// Returns an edited copy; the input is left untouched.
[[nodiscard]] BinaryMask apply_edit(const BinaryMask& mask,
                                    const MaskEdit& edit);

}  // namespace cacscore
