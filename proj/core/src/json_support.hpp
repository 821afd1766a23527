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

// JSON conversions shared by the report writers, manifests and the review
// service. Not installed.

#pragma once

#include <string>

#include <json.hpp>

#include "cacscore/agatston.hpp"
#include "cacscore/error.hpp"
#include "cacscore/metrics.hpp"
#include "cacscore/study.hpp"

namespace cacscore::json_support {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json config_json(const ScoringConfig& config);
ordered_json lesion_score_json(const LesionScore& lesion);
ordered_json report_json(const AgatstonReport& report);
ordered_json matrix_json(const ConfusionMatrix& cm);
ordered_json category_metrics_json(const CategoryMetrics& m);
ordered_json overlap_json(const CohortOverlap& overlap);

ScoringOverrides overrides_from(const json& doc);

/// Parses text, mapping syntax errors to `code`.
json parse(std::string_view text, ErrorCode code = ErrorCode::kInvalidManifest);

std::string base64_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> base64_decode(std::string_view text);

}  // namespace cacscore::json_support
