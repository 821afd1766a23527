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

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "cacscore/error.hpp"
#include "cacscore/metrics.hpp"
#include "test_support.hpp"

using namespace cacscore;
namespace t = cacscore::testing;

namespace {

using Counts = std::array<std::array<std::uint64_t, 4>, 4>;

ConfusionMatrix matrix(const Counts& counts) {
  ConfusionMatrix cm;
  cm.counts = counts;
  return cm;
}

const Counts kHeartlens{{{201, 10, 2, 3}, {4, 77, 7, 0}, {2, 4, 70, 5}, {0, 1, 4, 78}}};
const Counts kStanfordGated{{{63, 7, 6, 1}, {4, 126, 6, 4}, {0, 6, 94, 3}, {0, 0, 4, 119}}};
const Counts kNonGatedCardVit{{{98, 5, 2, 0}, {24, 17, 0, 0}, {2, 11, 14, 5}, {2, 1, 8, 16}}};
const Counts kNonGatedAiCac{{{92, 6, 5, 2}, {21, 19, 1, 0}, {2, 11, 13, 6}, {0, 1, 5, 21}}};

BinaryMask plane(std::size_t rows, std::size_t cols, std::initializer_list<int> on) {
  BinaryMask mask(Shape{1, rows, cols});
  for (const int i : on) mask.set(0, i / cols, i % cols, true);
  return mask;
}

Counts random_counts(std::mt19937_64& rng, std::uint64_t max_cell) {
  std::uniform_int_distribution<std::uint64_t> cell(0, max_cell);
  Counts c{};
  for (auto& row : c) {
    for (auto& v : row) v = cell(rng);
  }
  return c;
}

}  // namespace

// =============================================================================
// Slice overlap
// =============================================================================

TEST(SliceOverlapTest, PartialOverlap) {
  const auto pred = plane(2, 3, {0, 1, 2});
  const auto gt = plane(2, 3, {2, 3});
  const auto o = slice_overlap(MaskPlane::of(pred, 0), MaskPlane::of(gt, 0));
  EXPECT_DOUBLE_EQ(o.dice, 0.4);
  EXPECT_DOUBLE_EQ(o.iou, 0.25);
  EXPECT_DOUBLE_EQ(o.precision, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(o.recall, 0.5);
}

TEST(SliceOverlapTest, BothEmptyIsPerfect) {
  const auto empty = plane(2, 2, {});
  const auto o = slice_overlap(MaskPlane::of(empty, 0), MaskPlane::of(empty, 0));
  EXPECT_EQ(o.dice, 1.0);
  EXPECT_EQ(o.iou, 1.0);
  EXPECT_EQ(o.precision, 1.0);
  EXPECT_EQ(o.recall, 1.0);
}

TEST(SliceOverlapTest, EmptyPredictionAgainstLesion) {
  const auto o = slice_overlap(MaskPlane::of(plane(2, 2, {}), 0),
                               MaskPlane::of(plane(2, 2, {1}), 0));
  EXPECT_EQ(o.dice, 0.0);
  EXPECT_EQ(o.iou, 0.0);
  EXPECT_EQ(o.precision, 0.0);
  EXPECT_EQ(o.recall, 0.0);
}

TEST(SliceOverlapTest, ShapeMismatchIsRejected) {
  EXPECT_THROW((void)slice_overlap(MaskPlane::of(plane(2, 2, {}), 0),
                                   MaskPlane::of(plane(2, 3, {}), 0)),
               Error);
}

TEST(SliceOverlapTest, DiceIouIdentityOnRandomPlanes) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 500; ++trial) {
    const auto pred = t::random_mask(Shape{1, 9, 9}, 0.3, rng);
    const auto gt = t::random_mask(Shape{1, 9, 9}, 0.3, rng);
    const auto o = slice_overlap(MaskPlane::of(pred, 0), MaskPlane::of(gt, 0));
    EXPECT_NEAR(o.dice, 2.0 * o.iou / (1.0 + o.iou), 1e-12);
  }
}

TEST(CohortOverlapTest, AveragesAnnotatedSlicesAndCountsEmptyOnes) {
  const auto hit = plane(2, 2, {0});
  const auto miss = plane(2, 2, {1});
  const auto empty = plane(2, 2, {});
  const std::vector<OverlapCase> cases{
      {MaskPlane::of(hit, 0), MaskPlane::of(hit, 0), true},
      {MaskPlane::of(miss, 0), MaskPlane::of(hit, 0), true},
      {MaskPlane::of(empty, 0), MaskPlane::of(empty, 0), false},
      {MaskPlane::of(miss, 0), MaskPlane::of(empty, 0), false},
  };
  const auto o = cohort_overlap(cases);
  EXPECT_EQ(o.annotated_slices, 2u);
  EXPECT_DOUBLE_EQ(o.mean.dice, 0.5);
  EXPECT_EQ(o.empty_gt_slices, 2u);
  EXPECT_TRUE(o.empty_slice_specificity_defined);
  EXPECT_DOUBLE_EQ(o.empty_slice_specificity, 0.5);
}

TEST(CohortOverlapTest, NoAnnotatedSlicesIsAnError) {
  const auto empty = plane(2, 2, {});
  const std::vector<OverlapCase> cases{{MaskPlane::of(empty, 0), MaskPlane::of(empty, 0), false}};
  try {
    (void)cohort_overlap(cases);
    FAIL() << "expected error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoAnnotatedSlices);
  }
}

// =============================================================================
// Confusion matrix
// =============================================================================

TEST(ConfusionTest, CountsPairs) {
  const std::vector<RiskCategory> gt{RiskCategory::k0To10, RiskCategory::k400Plus,
                                     RiskCategory::k400Plus};
  const std::vector<RiskCategory> pred{RiskCategory::k0To10, RiskCategory::k101To400,
                                       RiskCategory::k400Plus};
  const auto cm = confusion(gt, pred);
  EXPECT_EQ(cm.n(), 3u);
  EXPECT_EQ(cm.counts[0][0], 1u);
  EXPECT_EQ(cm.counts[3][2], 1u);
  EXPECT_EQ(cm.counts[3][3], 1u);
  EXPECT_EQ(cm.trace(), 2u);
}

TEST(ConfusionTest, LengthMismatchIsRejected) {
  const std::vector<RiskCategory> gt{RiskCategory::k0To10};
  const std::vector<RiskCategory> pred;
  EXPECT_THROW((void)confusion(gt, pred), Error);
}

TEST(ConfusionTest, EmptyInputIsRejected) {
  const std::vector<RiskCategory> none;
  EXPECT_THROW((void)confusion(none, none), Error);
}

// =============================================================================
// Accuracy and kappa
// =============================================================================

TEST(KappaTest, ShippedMatricesMatchFrozenRecomputation) {
  EXPECT_DOUBLE_EQ(accuracy(matrix(kHeartlens)), 0.9102564102564102);
  EXPECT_NEAR(cohen_kappa(matrix(kHeartlens)), 0.8709855272226051, 1e-12);
  EXPECT_DOUBLE_EQ(accuracy(matrix(kStanfordGated)), 0.90744920993228);
  EXPECT_NEAR(cohen_kappa(matrix(kStanfordGated)), 0.8744600114736762, 1e-12);
  EXPECT_DOUBLE_EQ(accuracy(matrix(kNonGatedCardVit)), 0.7073170731707317);
  EXPECT_NEAR(cohen_kappa(matrix(kNonGatedCardVit)), 0.5281209238087932, 1e-12);
  EXPECT_DOUBLE_EQ(accuracy(matrix(kNonGatedAiCac)), 0.7073170731707317);
  EXPECT_NEAR(cohen_kappa(matrix(kNonGatedAiCac)), 0.5424447585745108, 1e-12);
}

TEST(KappaTest, PerfectAgreement) {
  const auto cm = matrix({{{5, 0, 0, 0}, {0, 3, 0, 0}, {0, 0, 2, 0}, {0, 0, 0, 1}}});
  EXPECT_EQ(accuracy(cm), 1.0);
  EXPECT_EQ(cohen_kappa(cm), 1.0);
}

TEST(KappaTest, SingleCellIsDegenerateButPerfect) {
  const auto cm = matrix({{{0, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}}});
  EXPECT_EQ(cohen_kappa(cm), 1.0);
}

TEST(KappaTest, InvariantUnderLabelPermutation) {
  std::mt19937_64 rng(41);
  std::array<std::size_t, 4> perm{0, 1, 2, 3};
  for (int trial = 0; trial < 200; ++trial) {
    const auto counts = random_counts(rng, 30);
    std::shuffle(perm.begin(), perm.end(), rng);
    Counts permuted{};
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = 0; j < 4; ++j) permuted[perm[i]][perm[j]] = counts[i][j];
    }
    EXPECT_NEAR(cohen_kappa(matrix(counts)), cohen_kappa(matrix(permuted)), 1e-12);
    EXPECT_DOUBLE_EQ(accuracy(matrix(counts)), accuracy(matrix(permuted)));
  }
}

// =============================================================================
// Per-category metrics
// =============================================================================

TEST(PerCategoryTest, HeartlensZeroToTen) {
  const auto m = per_category(matrix(kHeartlens), 0);
  EXPECT_EQ(m.tp, 201u);
  EXPECT_EQ(m.fn, 15u);
  EXPECT_EQ(m.fp, 6u);
  EXPECT_EQ(m.tn, 246u);
  EXPECT_DOUBLE_EQ(m.specificity, 246.0 / 252.0);
  EXPECT_DOUBLE_EQ(m.f1, 402.0 / 423.0);
}

TEST(PerCategoryTest, NonGatedHighRiskSensitivity) {
  EXPECT_DOUBLE_EQ(per_category(matrix(kNonGatedCardVit), 3).sensitivity, 16.0 / 27.0);
}

TEST(PerCategoryTest, UndefinedRatiosAreNamed) {
  const auto m = per_category(matrix({{{4, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}}}), 1);
  EXPECT_EQ(m.sensitivity, 0.0);
  EXPECT_NE(std::find(m.undefined.begin(), m.undefined.end(), "sensitivity"), m.undefined.end());
  EXPECT_NE(std::find(m.undefined.begin(), m.undefined.end(), "ppv"), m.undefined.end());
  EXPECT_DOUBLE_EQ(m.specificity, 1.0);
}

TEST(PerCategoryTest, MatchesBruteForceOnShippedAndRandomMatrices) {
  std::vector<Counts> all{kHeartlens, kStanfordGated, kNonGatedCardVit, kNonGatedAiCac};
  std::mt19937_64 rng(47);
  for (int i = 0; i < 100; ++i) {
    auto c = random_counts(rng, 20);
    for (std::size_t k = 0; k < 4; ++k) c[k][k] += 1;
    all.push_back(c);
  }
  std::vector<int> truth, pred;
  for (const auto& counts : all) {
    t::expand_matrix(counts, truth, pred);
    const auto oracle = t::brute_force_metrics(truth, pred);
    const auto cm = matrix(counts);
    EXPECT_DOUBLE_EQ(accuracy(cm), oracle.accuracy);
    EXPECT_NEAR(cohen_kappa(cm), oracle.kappa, 1e-12);
    for (std::size_t k = 0; k < 4; ++k) {
      const auto m = per_category(cm, k);
      EXPECT_DOUBLE_EQ(m.sensitivity, oracle.categories[k].sensitivity);
      EXPECT_DOUBLE_EQ(m.specificity, oracle.categories[k].specificity);
      EXPECT_DOUBLE_EQ(m.ppv, oracle.categories[k].ppv);
      EXPECT_DOUBLE_EQ(m.npv, oracle.categories[k].npv);
      EXPECT_DOUBLE_EQ(m.f1, oracle.categories[k].f1);
    }
  }
}
