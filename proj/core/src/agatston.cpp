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

#include "cacscore/agatston.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cacscore/error.hpp"

namespace cacscore {

void ScoringConfig::validate() const {
  if (!std::isfinite(hu_threshold) || hu_threshold < 0.0) {
    throw Error(ErrorCode::kInvalidConfig, "hu_threshold must be >= 0");
  }
  if (!std::isfinite(min_component_area_mm2) || min_component_area_mm2 < 0.0) {
    throw Error(ErrorCode::kInvalidConfig, "min_component_area_mm2 must be >= 0");
  }
}

std::string_view to_string(RiskCategory category) {
  switch (category) {
    case RiskCategory::k0To10: return "cat_0_10";
    case RiskCategory::k11To100: return "cat_11_100";
    case RiskCategory::k101To400: return "cat_101_400";
    case RiskCategory::k400Plus: return "cat_400_plus";
  }
  return "cat_0_10";
}

std::string_view display_label(RiskCategory category) {
  switch (category) {
    case RiskCategory::k0To10: return "0-10";
    case RiskCategory::k11To100: return "11-100";
    case RiskCategory::k101To400: return "101-400";
    case RiskCategory::k400Plus: return "400+";
  }
  return "0-10";
}

RiskCategory parse_category(std::string_view text) {
  for (const auto c : kAllCategories) {
    if (text == to_string(c) || text == display_label(c)) return c;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown risk category '" + std::string(text) + "'");
}

std::string_view to_string(ScoringMode mode) {
  return mode == ScoringMode::kLesionSpecific ? "lesion_specific"
                                              : "classic_slicewise";
}

ScoringMode parse_mode(std::string_view text) {
  if (text == "lesion_specific") return ScoringMode::kLesionSpecific;
  if (text == "classic_slicewise") return ScoringMode::kClassicSlicewise;
  throw Error(ErrorCode::kInvalidConfig,
              "mode must be lesion_specific or classic_slicewise, got '" +
                  std::string(text) + "'");
}

double score_lesion(const Lesion& lesion, const Volume& volume,
                    const ScoringConfig& cfg) {
  const Shape& shape = volume.shape();
  std::int16_t max_hu = std::numeric_limits<std::int16_t>::min();
  for (const auto& v : lesion.voxels) {
    if (!shape.contains(v.slice, v.row, v.col)) {
      throw Error(ErrorCode::kLesionVolumeMismatch,
                  "lesion " + std::to_string(lesion.id) + " lies outside the volume");
    }
    max_hu = std::max(max_hu, volume.at(static_cast<std::size_t>(v.slice),
                                        static_cast<std::size_t>(v.row),
                                        static_cast<std::size_t>(v.col)));
  }
  if (lesion.voxels.empty() || max_hu != lesion.max_hu) {
    throw Error(ErrorCode::kLesionVolumeMismatch,
                "lesion " + std::to_string(lesion.id) +
                    " was not extracted from this volume");
  }
  if (static_cast<double>(lesion.max_hu) < cfg.hu_threshold) return 0.0;

  const double thickness_factor =
      cfg.thickness_normalization
          ? volume.spacing().slice_mm / kReferenceSliceThicknessMm
          : 1.0;
  double score = 0.0;
  if (cfg.mode == ScoringMode::kLesionSpecific) {
    const int weight = density_weight(lesion.max_hu);
    for (const auto& [slice, area] : lesion.per_slice_area_mm2) {
      score += weight * area * thickness_factor;
    }
  } else {
    for (const auto& [slice, area] : lesion.per_slice_area_mm2) {
      const int weight = density_weight(lesion.per_slice_max_hu.at(slice));
      score += weight * area * thickness_factor;
    }
  }
  return score;
}

PatientScore score_patient_detailed(const Volume& volume, const BinaryMask& mask,
                                    const ScoringConfig& cfg) {
  cfg.validate();
  PatientScore out;
  out.lesions =
      extract_lesions(volume, mask, cfg.connectivity, cfg.min_component_area_mm2);
  auto& report = out.report;
  report.config = cfg;
  for (const auto& lesion : out.lesions) {
    LesionScore ls;
    ls.id = lesion.id;
    ls.score = score_lesion(lesion, volume, cfg);
    ls.max_hu = lesion.max_hu;
    ls.total_area_mm2 = lesion.total_area_mm2;
    ls.first_slice = lesion.first_slice();
    ls.last_slice = lesion.last_slice();
    ls.voxel_count = lesion.voxels.size();
    for (const auto& v : lesion.voxels) {
      ls.centroid[0] += static_cast<double>(v.slice);
      ls.centroid[1] += static_cast<double>(v.row);
      ls.centroid[2] += static_cast<double>(v.col);
    }
    for (auto& c : ls.centroid) c /= static_cast<double>(lesion.voxels.size());
    report.total_score += ls.score;
    report.per_lesion.push_back(ls);
  }
  report.category = categorize(report.total_score);
  return out;
}

AgatstonReport score_patient(const Volume& volume, const BinaryMask& mask,
                             const ScoringConfig& cfg) {
  return score_patient_detailed(volume, mask, cfg).report;
}

RiskCategory categorize(double score) {
  if (!(score >= 0.0)) {
    throw Error(ErrorCode::kNegativeScore, "score must be >= 0");
  }
  if (score <= 10.0) return RiskCategory::k0To10;
  if (score <= 100.0) return RiskCategory::k11To100;
  if (score <= 400.0) return RiskCategory::k101To400;
  return RiskCategory::k400Plus;
}

}  // namespace cacscore
