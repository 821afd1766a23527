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

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "cacscore/lesion.hpp"

namespace cacscore {

enum class ScoringMode { kLesionSpecific, kClassicSlicewise };

struct ScoringConfig {
  ScoringMode mode = ScoringMode::kLesionSpecific;
  double hu_threshold = kDefaultHuThreshold;
  double min_component_area_mm2 = kDefaultMinComponentAreaMm2;
  // Scales every slice term by slice_thickness / 3 mm.
  bool thickness_normalization = false;
  Connectivity connectivity;

  /// Throws kInvalidConfig on a negative threshold or area.
  void validate() const;

  friend bool operator==(const ScoringConfig&, const ScoringConfig&) = default;
};

enum class RiskCategory { k0To10, k11To100, k101To400, k400Plus };

inline constexpr std::array<RiskCategory, 4> kAllCategories = {
    RiskCategory::k0To10, RiskCategory::k11To100, RiskCategory::k101To400,
    RiskCategory::k400Plus};

/// "cat_0_10", "cat_11_100", "cat_101_400", "cat_400_plus".
[[nodiscard]] std::string_view to_string(RiskCategory category);
/// Short display label: "0-10", "11-100", "101-400", "400+".
[[nodiscard]] std::string_view display_label(RiskCategory category);
/// Accepts either spelling above.
[[nodiscard]] RiskCategory parse_category(std::string_view text);
[[nodiscard]] std::string_view to_string(ScoringMode mode);
[[nodiscard]] ScoringMode parse_mode(std::string_view text);

[[nodiscard]] constexpr std::size_t category_index(RiskCategory category) {
  return static_cast<std::size_t>(category);
}

struct LesionScore {
  std::uint32_t id = 0;
  double score = 0.0;
  std::int16_t max_hu = 0;
  double total_area_mm2 = 0.0;
  long first_slice = 0;
  long last_slice = 0;
  std::size_t voxel_count = 0;
  // Mean voxel index (slice, row, col).
  std::array<double, 3> centroid{};
};

struct AgatstonReport {
  std::vector<LesionScore> per_lesion;
  double total_score = 0.0;
  RiskCategory category = RiskCategory::k0To10;
  ScoringConfig config;
};

/// Agatston step weight: <130 -> 0, 130-199 -> 1, 200-299 -> 2,
/// 300-399 -> 3, >=400 -> 4.
[[nodiscard]] constexpr int density_weight(int peak_hu) {
  if (peak_hu < 130) return 0;
  if (peak_hu < 200) return 1;
  if (peak_hu < 300) return 2;
  if (peak_hu < 400) return 3;
  return 4;
}

[[nodiscard]] double score_lesion(const Lesion& lesion, const Volume& volume,
                                  const ScoringConfig& cfg);

struct PatientScore {
  AgatstonReport report;
  std::vector<Lesion> lesions;
};

[[nodiscard]] PatientScore score_patient_detailed(const Volume& volume,
                                                  const BinaryMask& mask,
                                                  const ScoringConfig& cfg);
[[nodiscard]] AgatstonReport score_patient(const Volume& volume,
                                           const BinaryMask& mask,
                                           const ScoringConfig& cfg);

/// Right-closed bins: [0,10], (10,100], (100,400], (400,inf).
[[nodiscard]] RiskCategory categorize(double score);

}  // namespace cacscore
