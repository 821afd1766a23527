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

// Confusion-matrix fixtures: a label header, a 4x4 integer grid (rows are
// ground truth, columns predictions) and optional reference metric values.
//
//   name = heartlens_gated
//   labels = 0-10 11-100 101-400 400+
//   201 10 2 3
//   4 77 7 0
//   2 4 70 5
//   0 1 4 78
//   reported_accuracy = 0.910
//   reported_kappa = 0.871
//   reported_sensitivity = 0.93 0.88 0.86 0.95
//
// Recognised reference rows: sensitivity, specificity, ppv, npv, f1.

#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cacscore/metrics.hpp"

namespace cacscore {

inline constexpr std::array<std::string_view, 5> kCategoryMetricNames = {
    "sensitivity", "specificity", "ppv", "npv", "f1"};

struct ReferenceValues {
  std::optional<double> accuracy;
  std::optional<double> kappa;
  // Metric name -> value per category.
  std::map<std::string, std::array<double, 4>> per_category;
};

struct ConfusionFixture {
  std::string name;
  std::string description;
  std::array<std::string, 4> labels;
  ConfusionMatrix matrix;
  ReferenceValues reported;

  [[nodiscard]] static ConfusionFixture parse(std::string_view text);
  [[nodiscard]] std::string serialize() const;
};

[[nodiscard]] ConfusionFixture read_confusion_fixture(
    const std::filesystem::path& path);

/// Every `*.cm` file in `dir`, sorted by file name. Throws kMissingFixture
/// when the directory is absent or holds no fixtures, or when one of
/// `required` (fixture names) is not present.
[[nodiscard]] std::vector<ConfusionFixture> load_fixture_set(
    const std::filesystem::path& dir,
    const std::vector<std::string>& required = {});

[[nodiscard]] double metric_value(const CategoryMetrics& m,
                                  std::string_view name);

struct ValueComparison {
  double recomputed = 0.0;
  std::optional<double> reported;

  [[nodiscard]] std::optional<double> delta() const;
};

/// Recomputed metrics next to the reference values for one fixture.
struct TableReproduction {
  std::string name;
  std::string description;
  ConfusionMatrix matrix;
  ValueComparison accuracy;
  ValueComparison kappa;
  std::array<CategoryMetrics, 4> categories;
  // metric name -> per category comparison
  std::map<std::string, std::array<ValueComparison, 4>> per_category;
};

[[nodiscard]] TableReproduction reproduce(const ConfusionFixture& fixture);

/// Fixed-width text rendering of one reproduction.
[[nodiscard]] std::string render_table(const TableReproduction& table);

}  // namespace cacscore
