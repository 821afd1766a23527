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

#include "cacscore/metrics.hpp"

#include <algorithm>
#include <string>

#include "cacscore/error.hpp"

namespace cacscore {
namespace {

// 0/0 yields 0 and records the metric name.
double ratio(std::uint64_t num, std::uint64_t den, const char* name,
             std::vector<std::string>* undefined) {
  if (den == 0) {
    if (undefined != nullptr) undefined->emplace_back(name);
    return 0.0;
  }
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

SliceOverlap slice_overlap(const MaskPlane& pred, const MaskPlane& gt) {
  if (pred.rows != gt.rows || pred.cols != gt.cols ||
      pred.values.size() != gt.values.size() ||
      pred.values.size() != pred.rows * pred.cols) {
    throw Error(ErrorCode::kShapeMismatch, "prediction and ground truth differ in shape");
  }
  std::uint64_t p = 0;
  std::uint64_t g = 0;
  std::uint64_t both = 0;
  for (std::size_t i = 0; i < pred.values.size(); ++i) {
    const bool a = pred.values[i] != 0;
    const bool b = gt.values[i] != 0;
    p += a;
    g += b;
    both += a && b;
  }
  if (p == 0 && g == 0) return {1.0, 1.0, 1.0, 1.0};
  SliceOverlap o;
  o.dice = ratio(2 * both, p + g, "dice", nullptr);
  o.iou = ratio(both, p + g - both, "iou", nullptr);
  o.precision = ratio(both, p, "precision", nullptr);
  o.recall = ratio(both, g, "recall", nullptr);
  return o;
}

CohortOverlap cohort_overlap(std::span<const OverlapCase> cases) {
  if (cases.empty()) throw Error(ErrorCode::kEmpty, "no overlap cases");
  CohortOverlap out;
  std::size_t empty_pred_on_empty_gt = 0;
  // Sequential accumulation keeps the means bitwise stable.
  for (const auto& c : cases) {
    const bool gt_empty =
        std::none_of(c.gt.values.begin(), c.gt.values.end(), [](auto v) { return v != 0; });
    if (gt_empty) {
      if (c.pred.values.size() != c.gt.values.size()) {
        throw Error(ErrorCode::kShapeMismatch,
                    "prediction and ground truth differ in shape");
      }
      ++out.empty_gt_slices;
      const bool pred_empty = std::none_of(c.pred.values.begin(), c.pred.values.end(),
                                           [](auto v) { return v != 0; });
      empty_pred_on_empty_gt += pred_empty;
    }
    if (!c.annotated) continue;
    const auto o = slice_overlap(c.pred, c.gt);
    out.mean.dice += o.dice;
    out.mean.iou += o.iou;
    out.mean.precision += o.precision;
    out.mean.recall += o.recall;
    ++out.annotated_slices;
  }
  if (out.annotated_slices == 0) {
    throw Error(ErrorCode::kNoAnnotatedSlices, "no annotated slices in cohort");
  }
  const auto n = static_cast<double>(out.annotated_slices);
  out.mean.dice /= n;
  out.mean.iou /= n;
  out.mean.precision /= n;
  out.mean.recall /= n;
  if (out.empty_gt_slices > 0) {
    out.empty_slice_specificity = static_cast<double>(empty_pred_on_empty_gt) /
                                  static_cast<double>(out.empty_gt_slices);
    out.empty_slice_specificity_defined = true;
  }
  return out;
}

std::uint64_t ConfusionMatrix::n() const {
  std::uint64_t total = 0;
  for (const auto& row : counts) {
    for (const auto v : row) total += v;
  }
  return total;
}

std::uint64_t ConfusionMatrix::row_sum(std::size_t k) const {
  std::uint64_t total = 0;
  for (const auto v : counts.at(k)) total += v;
  return total;
}

std::uint64_t ConfusionMatrix::col_sum(std::size_t k) const {
  std::uint64_t total = 0;
  for (const auto& row : counts) total += row.at(k);
  return total;
}

std::uint64_t ConfusionMatrix::trace() const {
  std::uint64_t total = 0;
  for (std::size_t k = 0; k < 4; ++k) total += counts[k][k];
  return total;
}

ConfusionMatrix confusion(std::span<const RiskCategory> gt,
                          std::span<const RiskCategory> pred) {
  if (gt.size() != pred.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                std::to_string(gt.size()) + " ground-truth labels vs " +
                    std::to_string(pred.size()) + " predictions");
  }
  if (gt.empty()) throw Error(ErrorCode::kEmpty, "no category pairs");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    ++cm.counts[category_index(gt[i])][category_index(pred[i])];
  }
  return cm;
}

CategoryMetrics per_category(const ConfusionMatrix& cm, std::size_t k) {
  if (k >= 4) throw Error(ErrorCode::kInvalidArgument, "category index out of range");
  CategoryMetrics m;
  const auto n = cm.n();
  const auto row = cm.row_sum(k);
  const auto col = cm.col_sum(k);
  m.tp = cm.counts[k][k];
  m.fn = row - m.tp;
  m.fp = col - m.tp;
  m.tn = n - row - col + m.tp;
  m.sensitivity = ratio(m.tp, m.tp + m.fn, "sensitivity", &m.undefined);
  m.specificity = ratio(m.tn, m.tn + m.fp, "specificity", &m.undefined);
  m.ppv = ratio(m.tp, m.tp + m.fp, "ppv", &m.undefined);
  m.npv = ratio(m.tn, m.tn + m.fn, "npv", &m.undefined);
  // 2TP / (2TP + FP + FN) equals the harmonic mean of PPV and sensitivity.
  m.f1 = ratio(2 * m.tp, 2 * m.tp + m.fp + m.fn, "f1", &m.undefined);
  return m;
}

double accuracy(const ConfusionMatrix& cm) {
  const auto n = cm.n();
  if (n == 0) throw Error(ErrorCode::kEmpty, "empty confusion matrix");
  return static_cast<double>(cm.trace()) / static_cast<double>(n);
}

double cohen_kappa(const ConfusionMatrix& cm) {
  const auto n = cm.n();
  if (n == 0) throw Error(ErrorCode::kEmpty, "empty confusion matrix");
  const double total = static_cast<double>(n);
  const double observed = static_cast<double>(cm.trace()) / total;
  double expected = 0.0;
  for (std::size_t k = 0; k < 4; ++k) {
    expected += static_cast<double>(cm.row_sum(k)) * static_cast<double>(cm.col_sum(k));
  }
  expected /= total * total;
  if (expected == 1.0) return observed == 1.0 ? 1.0 : 0.0;
  return (observed - expected) / (1.0 - expected);
}

}  // namespace cacscore
