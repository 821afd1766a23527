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

#include <cmath>
#include <random>

#include "cacscore/agatston.hpp"
#include "cacscore/error.hpp"
#include "cacscore/lesion.hpp"
#include "test_support.hpp"

using namespace cacscore;
namespace t = cacscore::testing;

namespace {

ScoringConfig config(ScoringMode mode, double min_area = 1.0) {
  ScoringConfig cfg;
  cfg.mode = mode;
  cfg.min_component_area_mm2 = min_area;
  return cfg;
}

void expect_relative(double actual, double expected, double tol = 1e-9) {
  EXPECT_LE(std::abs(actual - expected), tol * std::max(1.0, std::abs(expected)))
      << actual << " vs " << expected;
}

}  // namespace

// =============================================================================
// Density weights and categories
// =============================================================================

TEST(DensityWeightTest, Bands) {
  EXPECT_EQ(density_weight(129), 0);
  EXPECT_EQ(density_weight(130), 1);
  EXPECT_EQ(density_weight(199), 1);
  EXPECT_EQ(density_weight(200), 2);
  EXPECT_EQ(density_weight(299), 2);
  EXPECT_EQ(density_weight(300), 3);
  EXPECT_EQ(density_weight(399), 3);
  EXPECT_EQ(density_weight(400), 4);
  EXPECT_EQ(density_weight(3000), 4);
}

TEST(DensityWeightTest, MatchesOracleEverywhere) {
  for (int hu = -1024; hu <= 3071; ++hu) ASSERT_EQ(density_weight(hu), t::oracle_weight(hu));
}

TEST(CategorizeTest, RightClosedBins) {
  EXPECT_EQ(categorize(0.0), RiskCategory::k0To10);
  EXPECT_EQ(categorize(10.0), RiskCategory::k0To10);
  EXPECT_EQ(categorize(10.5), RiskCategory::k11To100);
  EXPECT_EQ(categorize(100.0), RiskCategory::k11To100);
  EXPECT_EQ(categorize(100.5), RiskCategory::k101To400);
  EXPECT_EQ(categorize(400.0), RiskCategory::k101To400);
  EXPECT_EQ(categorize(400.1), RiskCategory::k400Plus);
}

TEST(CategorizeTest, NegativeOrNanScoreIsRejected) {
  EXPECT_THROW((void)categorize(-0.1), Error);
  EXPECT_THROW((void)categorize(std::nan("")), Error);
}

TEST(CategorizeTest, NamesRoundTrip) {
  for (const auto c : kAllCategories) {
    EXPECT_EQ(parse_category(to_string(c)), c);
    EXPECT_EQ(parse_category(display_label(c)), c);
  }
  EXPECT_EQ(to_string(RiskCategory::k400Plus), "cat_400_plus");
}

// =============================================================================
// Phantoms
// =============================================================================

TEST(AgatstonPhantomTest, EightVoxelLesion) {
  const auto volume = t::eight_voxel_volume();
  const auto mask = threshold_segment(volume, 130.0);
  ASSERT_EQ(mask.count(), 8u);
  expect_relative(score_patient(volume, mask, ScoringConfig{}).total_score, 7.84);
}

TEST(AgatstonPhantomTest, TwoLesionLesionSpecific) {
  const auto report = score_patient(t::two_lesion_volume(), t::two_lesion_mask(), ScoringConfig{});
  ASSERT_EQ(report.per_lesion.size(), 2u);
  expect_relative(report.per_lesion[0].score, 7.84);
  expect_relative(report.per_lesion[1].score, 20.0);
  expect_relative(report.total_score, 27.84);
  EXPECT_EQ(report.category, RiskCategory::k11To100);
}

TEST(AgatstonPhantomTest, TwoLesionClassic) {
  const auto report = score_patient(t::two_lesion_volume(), t::two_lesion_mask(),
                                    config(ScoringMode::kClassicSlicewise));
  expect_relative(report.per_lesion[1].score, 14.0);
  expect_relative(report.total_score, 21.84);
}

TEST(AgatstonPhantomTest, RemovingLesionBLeavesLesionA) {
  const auto report = score_patient(t::two_lesion_volume(), t::lesion_a_mask(), ScoringConfig{});
  expect_relative(report.total_score, 7.84);
  EXPECT_EQ(report.category, RiskCategory::k0To10);
}

TEST(AgatstonPhantomTest, ZeroPhantom) {
  const auto volume = t::zero_volume();
  const auto report = score_patient(volume, threshold_segment(volume, 130.0), ScoringConfig{});
  EXPECT_EQ(report.total_score, 0.0);
  EXPECT_TRUE(report.per_lesion.empty());
  EXPECT_EQ(report.category, RiskCategory::k0To10);
}

TEST(AgatstonPhantomTest, SubMillimetreFocusScoresZero) {
  const Shape shape{1, 4, 4};
  const Volume volume(shape, Spacing{3.0, 0.5, 0.5},
                      std::vector<std::int16_t>(shape.voxel_count(), 500));
  BinaryMask mask(shape);
  mask.set(0, 1, 1, true);
  mask.set(0, 1, 2, true);
  mask.set(0, 2, 1, true);
  EXPECT_EQ(score_patient(volume, mask, ScoringConfig{}).total_score, 0.0);
}

TEST(AgatstonPhantomTest, SubThresholdLesionScoresZero) {
  const Shape shape{1, 4, 4};
  const Volume volume(shape, Spacing{3.0, 1.0, 1.0},
                      std::vector<std::int16_t>(shape.voxel_count(), 120));
  const BinaryMask mask(shape, std::vector<std::uint8_t>(shape.voxel_count(), 1));
  const auto report = score_patient(volume, mask, ScoringConfig{});
  EXPECT_EQ(report.total_score, 0.0);
  ASSERT_EQ(report.per_lesion.size(), 1u);
  EXPECT_EQ(report.per_lesion[0].score, 0.0);
}

TEST(AgatstonPhantomTest, ThicknessNormalization) {
  const auto thin = t::two_lesion_volume().with_spacing(Spacing{1.5, 0.2, 0.2});
  auto cfg = ScoringConfig{};
  expect_relative(score_patient(thin, t::two_lesion_mask(), cfg).total_score, 27.84);
  cfg.thickness_normalization = true;
  expect_relative(score_patient(thin, t::two_lesion_mask(), cfg).total_score, 13.92);
}

TEST(AgatstonPhantomTest, ShippedPhantomMatchesInMemoryPhantom) {
  const auto report = score_patient(t::two_lesion_volume(), t::two_lesion_mask(), ScoringConfig{});
  EXPECT_EQ(report.per_lesion[0].voxel_count, 98u);
  EXPECT_EQ(report.per_lesion[1].voxel_count, 125u);
  EXPECT_DOUBLE_EQ(report.per_lesion[1].centroid[0], 1.6);
}

// =============================================================================
// Errors
// =============================================================================

TEST(AgatstonErrorTest, NegativeThresholdIsInvalid) {
  auto cfg = ScoringConfig{};
  cfg.hu_threshold = -1.0;
  try {
    (void)score_patient(t::zero_volume(), BinaryMask(t::zero_volume().shape()), cfg);
    FAIL() << "expected invalid config";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidConfig);
  }
}

TEST(AgatstonErrorTest, LesionFromAnotherVolumeIsRejected) {
  const auto lesions =
      extract_lesions(t::two_lesion_volume(), t::two_lesion_mask(), Connectivity{}, 1.0);
  const Volume other(Shape{1, 2, 2}, Spacing{}, std::vector<std::int16_t>(4, 0));
  try {
    (void)score_lesion(lesions[0], other, ScoringConfig{});
    FAIL() << "expected mismatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kLesionVolumeMismatch);
  }
}

TEST(AgatstonErrorTest, ModeNames) {
  EXPECT_EQ(parse_mode("classic_slicewise"), ScoringMode::kClassicSlicewise);
  EXPECT_THROW((void)parse_mode("volume"), Error);
}

// =============================================================================
// Oracle agreement and properties
// =============================================================================

TEST(AgatstonOracleTest, RandomVolumesMatchDirectComputation) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const auto volume = t::random_volume(Shape{4, 9, 9}, Spacing{3.0, 0.6, 0.45}, rng);
    const auto mask = t::random_mask(volume.shape(), 0.25, rng);
    for (const bool lesion_specific : {true, false}) {
      const auto cfg = config(
          lesion_specific ? ScoringMode::kLesionSpecific : ScoringMode::kClassicSlicewise, 0.5);
      expect_relative(score_patient(volume, mask, cfg).total_score,
                      t::oracle_agatston(volume, mask, lesion_specific, 130.0, 0.5), 1e-12);
    }
  }
}

TEST(AgatstonPropertyTest, MonotoneUnderVoxelAddition) {
  std::mt19937_64 rng(5);
  const auto volume = t::random_volume(Shape{4, 10, 10}, Spacing{3.0, 0.5, 0.5}, rng);
  BinaryMask mask(volume.shape());
  std::uniform_int_distribution<std::size_t> s(0, 3), rc(0, 9);
  double last_specific = 0.0;
  double last_classic = 0.0;
  for (int step = 0; step < 500; ++step) {
    mask.set(s(rng), rc(rng), rc(rng), true);
    const double specific = score_patient(volume, mask, ScoringConfig{}).total_score;
    const double classic =
        score_patient(volume, mask, config(ScoringMode::kClassicSlicewise)).total_score;
    ASSERT_GE(specific, last_specific - 1e-12) << "step " << step;
    ASSERT_GE(classic, last_classic - 1e-12) << "step " << step;
    last_specific = specific;
    last_classic = classic;
  }
}

TEST(AgatstonPropertyTest, AreaScalesWithSquareOfPixelSpacing) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const auto volume = t::random_volume(Shape{3, 8, 8}, Spacing{3.0, 0.7, 0.3}, rng);
    const auto mask = t::random_mask(volume.shape(), 0.3, rng);
    const auto cfg = config(ScoringMode::kLesionSpecific, 0.0);
    const double base = score_patient(volume, mask, cfg).total_score;
    for (const double s : {0.5, 2.0, 3.0}) {
      const auto scaled = volume.with_spacing(Spacing{3.0, 0.7 * s, 0.3 * s});
      expect_relative(score_patient(scaled, mask, cfg).total_score, base * s * s, 1e-12);
    }
  }
}

TEST(AgatstonPropertyTest, ModesAgreeOnSingleSliceLesions) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const auto volume = t::random_volume(Shape{1, 12, 12}, Spacing{3.0, 0.4, 0.4}, rng);
    const auto mask = t::random_mask(volume.shape(), 0.35, rng);
    expect_relative(score_patient(volume, mask, ScoringConfig{}).total_score,
                    score_patient(volume, mask, config(ScoringMode::kClassicSlicewise))
                        .total_score,
                    1e-12);
  }
}

TEST(AgatstonPropertyTest, ThresholdMonotonicity) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const auto volume = t::random_volume(Shape{3, 10, 10}, Spacing{3.0, 0.5, 0.5}, rng);
    double last = std::numeric_limits<double>::infinity();
    for (double threshold = 130.0; threshold <= 700.0; threshold += 15.0) {
      auto cfg = ScoringConfig{};
      cfg.hu_threshold = threshold;
      const double score =
          score_patient(volume, threshold_segment(volume, threshold), cfg).total_score;
      ASSERT_LE(score, last + 1e-12) << "threshold " << threshold;
      last = score;
    }
  }
}

TEST(AgatstonPropertyTest, TotalIsSumOfLesions) {
  std::mt19937_64 rng(23);
  const auto volume = t::random_volume(Shape{4, 10, 10}, Spacing{3.0, 0.5, 0.5}, rng);
  const auto report = score_patient(volume, t::random_mask(volume.shape(), 0.3, rng),
                                    ScoringConfig{});
  double sum = 0.0;
  for (const auto& l : report.per_lesion) sum += l.score;
  EXPECT_DOUBLE_EQ(report.total_score, sum);
  EXPECT_EQ(report.category, categorize(report.total_score));
}
