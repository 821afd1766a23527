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

// Deterministic report serialization. JSON field order is fixed and doubles
// are written in shortest round-trip form, so identical inputs produce
// identical bytes.

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cacscore/agatston.hpp"
#include "cacscore/confusion_fixture.hpp"
#include "cacscore/study.hpp"

namespace cacscore {

[[nodiscard]] std::string config_to_json(const ScoringConfig& config);
[[nodiscard]] std::string report_to_json(const AgatstonReport& report,
                                         std::string_view study_id = {});
[[nodiscard]] std::string cohort_to_json(const CohortReport& report);
/// One row per study.
[[nodiscard]] std::string cohort_to_csv(const CohortReport& report);
[[nodiscard]] std::string tables_to_json(
    const std::vector<TableReproduction>& tables);

/// Human-readable lesion table; scores rounded to one decimal.
[[nodiscard]] std::string render_report_table(const AgatstonReport& report);
[[nodiscard]] std::string render_cohort_table(const CohortReport& report);

}  // namespace cacscore
