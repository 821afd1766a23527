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

#include <benchmark/benchmark.h>

#include <cstdint>
#include <random>
#include <vector>

#include "cacscore/agatston.hpp"
#include "cacscore/components.hpp"
#include "cacscore/dicom.hpp"
#include "cacscore/lesion.hpp"
#include "cacscore/mask.hpp"
#include "cacscore/metrics.hpp"
#include "cacscore/render.hpp"
#include "cacscore/review/session.hpp"

using namespace cacscore;

namespace {

// Soft tissue background with sparse calcified blobs.
Volume synthetic_ct(std::size_t slices, std::size_t side, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(40.0, 25.0);
  std::vector<std::int16_t> hu(slices * side * side);
  for (auto& v : hu) v = static_cast<std::int16_t>(noise(rng));
  std::uniform_int_distribution<std::size_t> pos(4, side - 5), sl(0, slices - 1);
  std::uniform_int_distribution<int> peak(140, 900);
  const Shape shape{slices, side, side};
  for (int blob = 0; blob < 40; ++blob) {
    const auto s = sl(rng);
    const auto r = pos(rng);
    const auto c = pos(rng);
    const auto value = static_cast<std::int16_t>(peak(rng));
    for (std::size_t dr = 0; dr < 4; ++dr) {
      for (std::size_t dc = 0; dc < 4; ++dc) hu[shape.index(s, r + dr - 2, c + dc - 2)] = value;
    }
  }
  return Volume(shape, Spacing{3.0, 0.4, 0.4}, std::move(hu));
}

BinaryMask random_mask(const Shape& shape, double density, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution on(density);
  std::vector<std::uint8_t> values(shape.voxel_count());
  for (auto& v : values) v = on(rng) ? 1 : 0;
  return BinaryMask(shape, std::move(values));
}

}  // namespace

static void BM_LabelComponents(benchmark::State& state) {
  const Shape shape{16, static_cast<std::size_t>(state.range(0)),
                    static_cast<std::size_t>(state.range(0))};
  const auto mask = random_mask(shape, 0.3, 1);
  const Connectivity conn{InPlaneConnectivity::kEight, CrossSliceConnectivity::kFull};
  for (auto _ : state) {
    auto grid = label_components(mask, conn);
    benchmark::DoNotOptimize(grid.count);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(shape.voxel_count()));
}
BENCHMARK(BM_LabelComponents)->Arg(64)->Arg(256)->Arg(512);

static void BM_ScorePatient(benchmark::State& state) {
  const auto volume = synthetic_ct(48, static_cast<std::size_t>(state.range(0)), 2);
  const auto mask = threshold_segment(volume, kDefaultHuThreshold);
  ScoringConfig cfg;
  cfg.mode = state.range(1) == 0 ? ScoringMode::kLesionSpecific : ScoringMode::kClassicSlicewise;
  for (auto _ : state) {
    auto report = score_patient(volume, mask, cfg);
    benchmark::DoNotOptimize(report.total_score);
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(volume.shape().voxel_count()));
}
BENCHMARK(BM_ScorePatient)->Args({256, 0})->Args({256, 1})->Args({512, 0});

static void BM_ThresholdSegment(benchmark::State& state) {
  const auto volume = synthetic_ct(48, 512, 3);
  for (auto _ : state) {
    auto mask = threshold_segment(volume, kDefaultHuThreshold);
    benchmark::DoNotOptimize(mask.values().data());
  }
}
BENCHMARK(BM_ThresholdSegment);

static void BM_DicomParse(benchmark::State& state) {
  SliceRecord record;
  record.rows = record.cols = static_cast<std::size_t>(state.range(0));
  record.rescale_intercept = -1024.0;
  record.raw_pixels.assign(record.rows * record.cols, 1000);
  dicom::WriteOptions options;
  options.explicit_vr = state.range(1) != 0;
  const auto bytes = dicom::write_slice(record, options);
  for (auto _ : state) {
    auto parsed = dicom::parse_slice(bytes);
    benchmark::DoNotOptimize(parsed.raw_pixels.data());
  }
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(bytes.size()));
}
BENCHMARK(BM_DicomParse)->Args({512, 1})->Args({512, 0});

static void BM_RenderFrame(benchmark::State& state) {
  const auto volume = synthetic_ct(4, 512, 4);
  const Window window;
  for (auto _ : state) {
    auto frame = render_frame(volume, 1, window);
    benchmark::DoNotOptimize(frame.data());
  }
}
BENCHMARK(BM_RenderFrame);

static void BM_OverlayRuns(benchmark::State& state) {
  const auto mask = random_mask(Shape{1, 512, 512}, 0.05, 5);
  for (auto _ : state) {
    auto runs = overlay_runs(mask, 0);
    benchmark::DoNotOptimize(runs.data());
  }
}
BENCHMARK(BM_OverlayRuns);

static void BM_MaskBundleRoundTrip(benchmark::State& state) {
  const auto mask = random_mask(Shape{48, 512, 512}, 0.01, 6);
  for (auto _ : state) {
    auto decoded = decode_mask_bundle(encode_mask_bundle(mask));
    benchmark::DoNotOptimize(decoded.values().data());
  }
}
BENCHMARK(BM_MaskBundleRoundTrip)->Unit(benchmark::kMillisecond);

static void BM_CohenKappa(benchmark::State& state) {
  ConfusionMatrix cm;
  cm.counts = {{{201, 10, 2, 3}, {4, 77, 7, 0}, {2, 4, 70, 5}, {0, 1, 4, 78}}};
  for (auto _ : state) {
    double kappa = cohen_kappa(cm);
    benchmark::DoNotOptimize(kappa);
  }
}
BENCHMARK(BM_CohenKappa);

static void BM_SessionEdit(benchmark::State& state) {
  auto volume = std::make_shared<const Volume>(synthetic_ct(16, 256, 7));
  review::StudySession session("bench", volume, threshold_segment(*volume, kDefaultHuThreshold),
                               ScoringConfig{});
  std::uint64_t revision = 0;
  bool value = false;
  for (auto _ : state) {
    auto outcome = session.apply(Paint{{{8, 128, 128}}, value}, revision++);
    value = !value;
    benchmark::DoNotOptimize(outcome.snapshot->report.total_score);
  }
}
BENCHMARK(BM_SessionEdit)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
