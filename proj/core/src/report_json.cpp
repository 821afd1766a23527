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

#include "cacscore/report_json.hpp"

#include <cstdio>

#include "json_support.hpp"

namespace cacscore {

using json_support::ordered_json;

namespace {

std::string fixed(double v, int digits) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.insert(0, width - s.size(), ' ');
  return s;
}

ordered_json comparison_json(const ValueComparison& v) {
  ordered_json j;
  j["recomputed"] = v.recomputed;
  if (v.reported) {
    j["reported"] = *v.reported;
    j["delta"] = *v.delta();
  } else {
    j["reported"] = nullptr;
    j["delta"] = nullptr;
  }
  return j;
}

}  // namespace

std::string config_to_json(const ScoringConfig& config) {
  return json_support::config_json(config).dump(2) + "\n";
}

std::string report_to_json(const AgatstonReport& report, std::string_view study_id) {
  ordered_json j;
  if (!study_id.empty()) j["study_id"] = study_id;
  const auto body = json_support::report_json(report);
  for (const auto& [key, value] : body.items()) j[key] = value;
  j["tool_version"] = kToolVersion;
  return j.dump(2) + "\n";
}

std::string cohort_to_json(const CohortReport& report) {
  ordered_json j;
  j["cohort_id"] = report.cohort_id;
  j["tool_version"] = report.tool_version;
  j["config"] = json_support::config_json(report.config);
  j["study_count"] = report.studies.size();
  j["labeled_count"] = report.confusion.n();
  j["accuracy"] = report.accuracy;
  j["kappa"] = report.kappa;
  j["confusion"] = json_support::matrix_json(report.confusion);
  ordered_json cats;
  for (std::size_t k = 0; k < 4; ++k) {
    cats[std::string(to_string(kAllCategories[k]))] =
        json_support::category_metrics_json(report.categories[k]);
  }
  j["per_category"] = std::move(cats);
  j["overlap"] = report.overlap ? json_support::overlap_json(*report.overlap) : ordered_json();
  ordered_json studies = ordered_json::array();
  for (const auto& s : report.studies) {
    ordered_json e;
    e["study_id"] = s.study_id;
    e["report"] = json_support::report_json(s.report);
    ordered_json gt;
    gt["score"] = s.ground_truth.score ? ordered_json(*s.ground_truth.score) : ordered_json();
    const auto cat = s.ground_truth.resolved_category();
    gt["category"] = cat ? ordered_json(to_string(*cat)) : ordered_json();
    e["ground_truth"] = std::move(gt);
    studies.push_back(std::move(e));
  }
  j["studies"] = std::move(studies);
  return j.dump(2) + "\n";
}

std::string cohort_to_csv(const CohortReport& report) {
  std::string out =
      "study_id,total_score,category,lesion_count,gt_score,gt_category,agree\n";
  for (const auto& s : report.studies) {
    const auto cat = s.ground_truth.resolved_category();
    out += s.study_id + "," + ordered_json(s.report.total_score).dump() + "," +
           std::string(to_string(s.report.category)) + "," +
           std::to_string(s.report.per_lesion.size()) + "," +
           (s.ground_truth.score ? ordered_json(*s.ground_truth.score).dump() : "") + "," +
           (cat ? std::string(to_string(*cat)) : "") + "," +
           (cat ? (*cat == s.report.category ? "1" : "0") : "") + "\n";
  }
  return out;
}

std::string tables_to_json(const std::vector<TableReproduction>& tables) {
  ordered_json arr = ordered_json::array();
  for (const auto& t : tables) {
    ordered_json j;
    j["name"] = t.name;
    j["description"] = t.description;
    j["confusion"] = json_support::matrix_json(t.matrix);
    j["accuracy"] = comparison_json(t.accuracy);
    j["kappa"] = comparison_json(t.kappa);
    ordered_json cats;
    for (std::size_t k = 0; k < 4; ++k) {
      ordered_json c;
      for (const auto name : kCategoryMetricNames) {
        c[std::string(name)] = comparison_json(t.per_category.at(std::string(name))[k]);
      }
      c["undefined"] = t.categories[k].undefined;
      cats[std::string(to_string(kAllCategories[k]))] = std::move(c);
    }
    j["per_category"] = std::move(cats);
    arr.push_back(std::move(j));
  }
  ordered_json doc;
  doc["tool_version"] = kToolVersion;
  doc["tables"] = std::move(arr);
  return doc.dump(2) + "\n";
}

std::string render_report_table(const AgatstonReport& report) {
  std::string out = "  id     score  max_hu  area_mm2  slices\n";
  for (const auto& l : report.per_lesion) {
    out += pad(std::to_string(l.id), 4) + pad(fixed(l.score, 1), 10) +
           pad(std::to_string(l.max_hu), 8) + pad(fixed(l.total_area_mm2, 1), 10) +
           "  " + std::to_string(l.first_slice) + "-" + std::to_string(l.last_slice) + "\n";
  }
  out += "total " + fixed(report.total_score, 1) + "  category " +
         std::string(display_label(report.category)) + " (" +
         std::string(to_string(report.config.mode)) + ")\n";
  return out;
}

std::string render_cohort_table(const CohortReport& report) {
  std::string out = report.cohort_id + ": " + std::to_string(report.confusion.n()) +
                    " labeled studies\n";
  out += "  accuracy " + fixed(report.accuracy, 3) + "  kappa " + fixed(report.kappa, 3) + "\n";
  out += "  category   sens   spec    ppv    npv     f1\n";
  for (std::size_t k = 0; k < 4; ++k) {
    const auto& m = report.categories[k];
    out += "  " + std::string(display_label(kAllCategories[k]));
    out.append(9 - display_label(kAllCategories[k]).size(), ' ');
    for (const double v : {m.sensitivity, m.specificity, m.ppv, m.npv, m.f1}) {
      out += pad(fixed(v, 3), 7);
    }
    out += "\n";
  }
  if (report.overlap) {
    const auto& o = *report.overlap;
    out += "  overlap over " + std::to_string(o.annotated_slices) +
           " annotated slices: dice " + fixed(o.mean.dice, 3) + " iou " +
           fixed(o.mean.iou, 3) + " precision " + fixed(o.mean.precision, 3) +
           " recall " + fixed(o.mean.recall, 3) + "\n";
  }
  return out;
}

}  // namespace cacscore
