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

#include "cacscore/confusion_fixture.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>

#include "cacscore/error.hpp"
#include "cacscore/key_value.hpp"
#include "cacscore/raw_fixture.hpp"

namespace cacscore {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> tokens(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::array<double, 4> four_values(const KeyValueDocument& doc, const std::string& key) {
  const auto values = doc.get_doubles(key);
  if (values.size() != 4) {
    throw Error(ErrorCode::kInvalidManifest, key + " needs four values");
  }
  return {values[0], values[1], values[2], values[3]};
}

std::string fixed(double v, int digits) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

}  // namespace

ConfusionFixture ConfusionFixture::parse(std::string_view text) {
  ConfusionFixture f;
  std::string kv_text;
  std::size_t grid_rows = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (f.description.empty()) f.description = std::string(trim(line.substr(1)));
      continue;
    }
    if (line.find('=') != std::string_view::npos) {
      kv_text.append(line);
      kv_text.push_back('\n');
      continue;
    }
    const auto cells = tokens(line);
    if (cells.size() != 4 || grid_rows >= 4) {
      throw Error(ErrorCode::kInvalidManifest, "confusion grid must be 4x4");
    }
    for (std::size_t c = 0; c < 4; ++c) {
      std::uint64_t v = 0;
      const auto* last = cells[c].data() + cells[c].size();
      const auto [ptr, ec] = std::from_chars(cells[c].data(), last, v);
      if (ec != std::errc() || ptr != last) {
        throw Error(ErrorCode::kInvalidManifest,
                    "'" + std::string(cells[c]) + "' is not a count");
      }
      f.matrix.counts[grid_rows][c] = v;
    }
    ++grid_rows;
  }
  if (grid_rows != 4) {
    throw Error(ErrorCode::kInvalidManifest, "confusion grid must have four rows");
  }
  const auto doc = KeyValueDocument::parse(kv_text);
  f.name = doc.get_or("name", "");
  const auto label_tokens = tokens(doc.get("labels"));
  if (label_tokens.size() != 4) {
    throw Error(ErrorCode::kInvalidManifest, "labels needs four entries");
  }
  for (std::size_t k = 0; k < 4; ++k) f.labels[k] = std::string(label_tokens[k]);
  if (doc.has("reported_accuracy")) f.reported.accuracy = doc.get_double("reported_accuracy");
  if (doc.has("reported_kappa")) f.reported.kappa = doc.get_double("reported_kappa");
  for (const auto name : kCategoryMetricNames) {
    const std::string key = "reported_" + std::string(name);
    if (doc.has(key)) f.reported.per_category[std::string(name)] = four_values(doc, key);
  }
  return f;
}

std::string ConfusionFixture::serialize() const {
  std::string out;
  if (!description.empty()) out += "# " + description + "\n";
  if (!name.empty()) out += "name = " + name + "\n";
  out += "labels = " + labels[0] + " " + labels[1] + " " + labels[2] + " " + labels[3] + "\n";
  for (const auto& row : matrix.counts) {
    out += std::to_string(row[0]) + " " + std::to_string(row[1]) + " " +
           std::to_string(row[2]) + " " + std::to_string(row[3]) + "\n";
  }
  if (reported.accuracy) out += "reported_accuracy = " + format_double(*reported.accuracy) + "\n";
  if (reported.kappa) out += "reported_kappa = " + format_double(*reported.kappa) + "\n";
  for (const auto name : kCategoryMetricNames) {
    const auto it = reported.per_category.find(std::string(name));
    if (it == reported.per_category.end()) continue;
    out += "reported_" + std::string(name) + " =";
    for (const auto v : it->second) out += " " + format_double(v);
    out += "\n";
  }
  return out;
}

ConfusionFixture read_confusion_fixture(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(ErrorCode::kMissingFixture, "missing fixture " + path.string());
  }
  const auto bytes = read_file_bytes(path);
  auto fixture = ConfusionFixture::parse(std::string(bytes.begin(), bytes.end()));
  if (fixture.name.empty()) fixture.name = path.stem().string();
  return fixture;
}

std::vector<ConfusionFixture> load_fixture_set(const std::filesystem::path& dir,
                                               const std::vector<std::string>& required) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw Error(ErrorCode::kMissingFixture, "fixture directory " + dir.string() + " not found");
  }
  std::vector<std::filesystem::path> paths;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".cm") {
      paths.push_back(entry.path());
    }
  }
  std::sort(paths.begin(), paths.end());
  if (paths.empty()) {
    throw Error(ErrorCode::kMissingFixture, "no .cm fixtures in " + dir.string());
  }
  std::vector<ConfusionFixture> out;
  std::set<std::string> names;
  for (const auto& p : paths) {
    out.push_back(read_confusion_fixture(p));
    names.insert(out.back().name);
  }
  for (const auto& r : required) {
    if (!names.contains(r)) {
      throw Error(ErrorCode::kMissingFixture, "fixture '" + r + "' not found in " + dir.string());
    }
  }
  return out;
}

double metric_value(const CategoryMetrics& m, std::string_view name) {
  if (name == "sensitivity") return m.sensitivity;
  if (name == "specificity") return m.specificity;
  if (name == "ppv") return m.ppv;
  if (name == "npv") return m.npv;
  if (name == "f1") return m.f1;
  throw Error(ErrorCode::kInvalidArgument, "unknown metric '" + std::string(name) + "'");
}

std::optional<double> ValueComparison::delta() const {
  if (!reported) return std::nullopt;
  return std::abs(recomputed - *reported);
}

TableReproduction reproduce(const ConfusionFixture& fixture) {
  TableReproduction t;
  t.name = fixture.name;
  t.description = fixture.description;
  t.matrix = fixture.matrix;
  t.accuracy = {accuracy(fixture.matrix), fixture.reported.accuracy};
  t.kappa = {cohen_kappa(fixture.matrix), fixture.reported.kappa};
  for (std::size_t k = 0; k < 4; ++k) t.categories[k] = per_category(fixture.matrix, k);
  for (const auto name : kCategoryMetricNames) {
    std::array<ValueComparison, 4> row;
    const auto it = fixture.reported.per_category.find(std::string(name));
    for (std::size_t k = 0; k < 4; ++k) {
      row[k].recomputed = metric_value(t.categories[k], name);
      if (it != fixture.reported.per_category.end()) row[k].reported = it->second[k];
    }
    t.per_category[std::string(name)] = row;
  }
  return t;
}

std::string render_table(const TableReproduction& t) {
  std::string out = t.name;
  if (!t.description.empty()) out += "  (" + t.description + ")";
  out += "\n";
  const auto cell = [](const ValueComparison& v, int digits) {
    std::string s = fixed(v.recomputed, digits);
    if (v.reported) {
      s += " [" + fixed(*v.reported, digits) + " d=" + fixed(*v.delta(), 3) + "]";
    }
    return s;
  };
  out += "  accuracy " + cell(t.accuracy, 3) + "\n";
  out += "  kappa    " + cell(t.kappa, 3) + "\n";
  static constexpr std::array<std::string_view, 4> kLabels = {"0-10", "11-100",
                                                              "101-400", "400+"};
  for (std::size_t k = 0; k < 4; ++k) {
    out += "  " + std::string(kLabels[k]);
    out.append(9 - kLabels[k].size(), ' ');
    for (const auto name : kCategoryMetricNames) {
      out += std::string(name) + " " + cell(t.per_category.at(std::string(name))[k], 3) + "  ";
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    out += "\n";
  }
  return out;
}

}  // namespace cacscore
