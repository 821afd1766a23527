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
#include <span>
#include <string>
#include <vector>

#include "cacscore/agatston.hpp"
#include "cacscore/mask.hpp"

namespace cacscore {

/// A 2D boolean plane (one mask slice).
struct MaskPlane {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::span<const std::uint8_t> values;

  [[nodiscard]] static MaskPlane of(const BinaryMask& mask, std::size_t s) {
    return {mask.shape().rows, mask.shape().cols, mask.slice(s)};
  }
};

struct SliceOverlap {
  double dice = 0.0;
  double iou = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

/// Both-empty planes score 1.0 on every metric; a single empty denominator
/// yields 0.0 for that metric.
[[nodiscard]] SliceOverlap slice_overlap(const MaskPlane& pred,
                                         const MaskPlane& gt);

struct OverlapCase {
  MaskPlane pred;
  MaskPlane gt;
  bool annotated = false;
};

struct CohortOverlap {
  SliceOverlap mean;
  std::size_t annotated_slices = 0;
  std::size_t empty_gt_slices = 0;
  // Fraction of empty-GT slices predicted empty; 0.0 and undefined when
  // there are none.
  double empty_slice_specificity = 0.0;
  bool empty_slice_specificity_defined = false;
};

[[nodiscard]] CohortOverlap cohort_overlap(std::span<const OverlapCase> cases);

/// Rows are ground truth, columns predictions.
struct ConfusionMatrix {
  std::array<std::array<std::uint64_t, 4>, 4> counts{};

  [[nodiscard]] std::uint64_t n() const;
  [[nodiscard]] std::uint64_t row_sum(std::size_t k) const;
  [[nodiscard]] std::uint64_t col_sum(std::size_t k) const;
  [[nodiscard]] std::uint64_t trace() const;

  friend bool operator==(const ConfusionMatrix&,
                         const ConfusionMatrix&) = default;
};

[[nodiscard]] ConfusionMatrix confusion(std::span<const RiskCategory> gt,
                                        std::span<const RiskCategory> pred);

struct CategoryMetrics {
  double sensitivity = 0.0;
  double specificity = 0.0;
  double ppv = 0.0;
  double npv = 0.0;
  double f1 = 0.0;
  // Names of metrics whose ratio was 0/0 (reported as 0.0).
  std::vector<std::string> undefined;

  std::uint64_t tp = 0;
  std::uint64_t fn = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
};

/// One-vs-rest metrics for category index k (0..3).
[[nodiscard]] CategoryMetrics per_category(const ConfusionMatrix& cm,
                                           std::size_t k);

[[nodiscard]] double accuracy(const ConfusionMatrix& cm);

/// Unweighted Cohen's kappa. When chance agreement is 1 the result is 1 for
/// perfect agreement and 0 otherwise.
[[nodiscard]] double cohen_kappa(const ConfusionMatrix& cm);

}  // namespace cacscore
