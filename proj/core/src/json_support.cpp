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

#include "json_support.hpp"

#include <algorithm>
#include <array>

#include <boost/archive/iterators/base64_from_binary.hpp>
#include <boost/archive/iterators/binary_from_base64.hpp>
#include <boost/archive/iterators/transform_width.hpp>

namespace cacscore::json_support {

ordered_json config_json(const ScoringConfig& config) {
  ordered_json j;
  j["mode"] = to_string(config.mode);
  j["hu_threshold"] = config.hu_threshold;
  j["min_component_area_mm2"] = config.min_component_area_mm2;
  j["thickness_normalization"] = config.thickness_normalization;
  j["connectivity"] = {{"in_plane", to_string(config.connectivity.in_plane)},
                       {"cross_slice", to_string(config.connectivity.cross_slice)}};
  return j;
}

ordered_json lesion_score_json(const LesionScore& lesion) {
  ordered_json j;
  j["id"] = lesion.id;
  j["score"] = lesion.score;
  j["max_hu"] = lesion.max_hu;
  j["total_area_mm2"] = lesion.total_area_mm2;
  j["slice_span"] = {lesion.first_slice, lesion.last_slice};
  j["voxel_count"] = lesion.voxel_count;
  j["centroid"] = {lesion.centroid[0], lesion.centroid[1], lesion.centroid[2]};
  return j;
}

ordered_json report_json(const AgatstonReport& report) {
  ordered_json j;
  j["total_score"] = report.total_score;
  j["category"] = to_string(report.category);
  j["lesion_count"] = report.per_lesion.size();
  ordered_json lesions = ordered_json::array();
  for (const auto& l : report.per_lesion) lesions.push_back(lesion_score_json(l));
  j["per_lesion"] = std::move(lesions);
  j["config"] = config_json(report.config);
  return j;
}

ordered_json matrix_json(const ConfusionMatrix& cm) {
  ordered_json j;
  ordered_json labels = ordered_json::array();
  for (const auto c : kAllCategories) labels.push_back(to_string(c));
  j["labels"] = std::move(labels);
  ordered_json rows = ordered_json::array();
  for (const auto& row : cm.counts) rows.push_back({row[0], row[1], row[2], row[3]});
  j["counts"] = std::move(rows);
  j["n"] = cm.n();
  return j;
}

ordered_json category_metrics_json(const CategoryMetrics& m) {
  ordered_json j;
  j["sensitivity"] = m.sensitivity;
  j["specificity"] = m.specificity;
  j["ppv"] = m.ppv;
  j["npv"] = m.npv;
  j["f1"] = m.f1;
  j["undefined"] = m.undefined;
  j["tp"] = m.tp;
  j["fn"] = m.fn;
  j["fp"] = m.fp;
  j["tn"] = m.tn;
  return j;
}

ordered_json overlap_json(const CohortOverlap& overlap) {
  ordered_json j;
  j["dice"] = overlap.mean.dice;
  j["iou"] = overlap.mean.iou;
  j["precision"] = overlap.mean.precision;
  j["recall"] = overlap.mean.recall;
  j["annotated_slices"] = overlap.annotated_slices;
  j["empty_gt_slices"] = overlap.empty_gt_slices;
  if (overlap.empty_slice_specificity_defined) {
    j["empty_slice_specificity"] = overlap.empty_slice_specificity;
  } else {
    j["empty_slice_specificity"] = nullptr;
  }
  return j;
}

namespace {

template <typename T>
T typed(const json& doc, const char* key) {
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::kInvalidConfig, std::string("config field '") + key +
                                               "' has the wrong type");
  }
}

}  // namespace

ScoringOverrides overrides_from(const json& doc) {
  ScoringOverrides o;
  if (doc.is_null()) return o;
  if (!doc.is_object()) throw Error(ErrorCode::kInvalidConfig, "scoring config must be an object");
  static const std::array<std::string_view, 8> kKnown = {
      "mode", "hu_threshold", "min_component_area_mm2", "thickness_normalization",
      "connectivity", "in_plane", "cross_slice", "comment"};
  for (const auto& [key, value] : doc.items()) {
    if (std::find(kKnown.begin(), kKnown.end(), key) == kKnown.end()) {
      throw Error(ErrorCode::kInvalidConfig, "unknown config field '" + key + "'");
    }
  }
  if (doc.contains("mode")) o.mode = parse_mode(typed<std::string>(doc, "mode"));
  if (doc.contains("hu_threshold")) o.hu_threshold = typed<double>(doc, "hu_threshold");
  if (doc.contains("min_component_area_mm2")) {
    o.min_component_area_mm2 = typed<double>(doc, "min_component_area_mm2");
  }
  if (doc.contains("thickness_normalization")) {
    o.thickness_normalization = typed<bool>(doc, "thickness_normalization");
  }
  const json* conn = &doc;
  if (doc.contains("connectivity")) conn = &doc.at("connectivity");
  if (conn->contains("in_plane")) {
    const auto& v = conn->at("in_plane");
    o.in_plane = parse_in_plane(v.is_number() ? std::to_string(v.get<int>())
                                              : typed<std::string>(*conn, "in_plane"));
  }
  if (conn->contains("cross_slice")) {
    o.cross_slice = parse_cross_slice(typed<std::string>(*conn, "cross_slice"));
  }
  return o;
}

json parse(std::string_view text, ErrorCode code) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(code, std::string("invalid JSON: ") + e.what());
  }
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  using namespace boost::archive::iterators;
  using It = base64_from_binary<transform_width<const std::uint8_t*, 6, 8>>;
  std::string out(It(bytes.data()), It(bytes.data() + bytes.size()));
  out.append((3 - bytes.size() % 3) % 3, '=');
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  using namespace boost::archive::iterators;
  using It = transform_width<binary_from_base64<const char*>, 8, 6>;
  std::size_t padding = 0;
  while (!text.empty() && text.back() == '=') {
    text.remove_suffix(1);
    ++padding;
  }
  if (padding > 2 || text.size() % 4 == 1) {
    throw Error(ErrorCode::kInvalidArgument, "malformed base64");
  }
  try {
    std::vector<std::uint8_t> out(It(text.data()), It(text.data() + text.size()));
    out.resize(text.size() * 3 / 4);
    return out;
  } catch (const std::exception&) {
    throw Error(ErrorCode::kInvalidArgument, "malformed base64");
  }
}

}  // namespace cacscore::json_support
