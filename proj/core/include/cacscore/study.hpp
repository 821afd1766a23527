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

// Study and cohort manifests (JSON) and the batch scoring/evaluation that the
// command-line tool runs.
//
// Study manifest:
//   {
//     "study_id": "phantom",
//     "input": {"kind": "raw_fixture" | "dicom_dir", "path": "..."},
//     "mask": {"source": "file", "path": "..."}
//           | {"source": "threshold"}
//           | {"source": "provider", "endpoint": "http://..."},
//     "scoring": {<ScoringConfig overrides>},
//     "ground_truth": {"score": 27.84, "category": "cat_11_100",
//                      "mask": "gt.mask.txt"}
//   }
//
// Cohort manifest:
//   {"cohort_id": "...", "scoring": {...},
//    "studies": [<study manifest> | "relative/path/to/study.json", ...]}
//
// Relative paths resolve against the directory holding the manifest.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cacscore/agatston.hpp"
#include "cacscore/metrics.hpp"

namespace cacscore {

inline constexpr char kToolVersion[] = "0.1.0";

/// Partial ScoringConfig; unset fields leave the base value.
struct ScoringOverrides {
  std::optional<ScoringMode> mode;
  std::optional<double> hu_threshold;
  std::optional<double> min_component_area_mm2;
  std::optional<bool> thickness_normalization;
  std::optional<InPlaneConnectivity> in_plane;
  std::optional<CrossSliceConnectivity> cross_slice;

  /// Field names mirror ScoringConfig; connectivity may be given flat
  /// ("in_plane", "cross_slice") or nested under "connectivity".
  [[nodiscard]] static ScoringOverrides parse_json(std::string_view text);
  [[nodiscard]] ScoringConfig apply(ScoringConfig base) const;
};

enum class InputKind { kDicomDir, kRawFixture };
enum class MaskSourceKind { kFile, kThreshold, kProvider };

struct GroundTruth {
  std::optional<double> score;
  std::optional<RiskCategory> category;
  std::optional<std::filesystem::path> mask;

  /// Explicit category, else categorize(score), else none.
  [[nodiscard]] std::optional<RiskCategory> resolved_category() const;
};

struct StudyManifest {
  std::string study_id;
  InputKind input_kind = InputKind::kRawFixture;
  std::filesystem::path input_path;
  MaskSourceKind mask_source = MaskSourceKind::kThreshold;
  std::filesystem::path mask_path;
  std::string provider_endpoint;
  ScoringOverrides scoring;
  GroundTruth ground_truth;

  [[nodiscard]] static StudyManifest parse_json(
      std::string_view text, const std::filesystem::path& base_dir);
  [[nodiscard]] static StudyManifest read(const std::filesystem::path& path);
};

struct CohortManifest {
  std::string cohort_id;
  ScoringOverrides scoring;
  std::vector<StudyManifest> studies;

  [[nodiscard]] static CohortManifest parse_json(
      std::string_view text, const std::filesystem::path& base_dir);
  [[nodiscard]] static CohortManifest read(const std::filesystem::path& path);
};

struct StudyResult {
  std::string study_id;
  AgatstonReport report;
  GroundTruth ground_truth;
  // Per-slice overlap inputs, present when a ground-truth mask was given.
  std::optional<BinaryMask> predicted_mask;
  std::optional<BinaryMask> ground_truth_mask;
};

/// Loads inputs, obtains the mask and scores. Provider endpoints come from
/// the manifest or, failing that, the environment variable in provider.hpp.
[[nodiscard]] StudyResult run_study(const StudyManifest& manifest,
                                    const ScoringConfig& base_config);

struct CohortReport {
  std::string cohort_id;
  std::vector<StudyResult> studies;
  ConfusionMatrix confusion;
  std::array<CategoryMetrics, 4> categories;
  double accuracy = 0.0;
  double kappa = 0.0;
  std::optional<CohortOverlap> overlap;
  ScoringConfig config;
  std::string tool_version = kToolVersion;
};

/// Scores every study (concurrently, up to `threads`) and aggregates against
/// ground truth. Throws kNoGroundTruth when no study carries a category.
[[nodiscard]] CohortReport evaluate_cohort(const CohortManifest& manifest,
                                           const ScoringConfig& base_config,
                                           unsigned threads = 0);

}  // namespace cacscore
