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

#include "cacscore/key_value.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "cacscore/error.hpp"

namespace cacscore {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
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

}  // namespace

KeyValueDocument KeyValueDocument::parse(std::string_view text) {
  KeyValueDocument doc;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = trim(text.substr(pos, end - pos));
    ++line_no;
    pos = end + 1;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kInvalidManifest,
                  "line " + std::to_string(line_no) + ": expected key = value");
    }
    std::string key(trim(line.substr(0, eq)));
    if (key.empty()) {
      throw Error(ErrorCode::kInvalidManifest,
                  "line " + std::to_string(line_no) + ": empty key");
    }
    if (doc.has(key)) {
      throw Error(ErrorCode::kInvalidManifest, "duplicate key '" + key + "'");
    }
    doc.set(key, std::string(trim(line.substr(eq + 1))));
  }
  return doc;
}

bool KeyValueDocument::has(const std::string& key) const {
  return values_.contains(key);
}

const std::string& KeyValueDocument::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) {
    throw Error(ErrorCode::kInvalidManifest, "missing key '" + key + "'");
  }
  return it->second;
}

std::string KeyValueDocument::get_or(const std::string& key,
                                     std::string fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? std::move(fallback) : it->second;
}

double KeyValueDocument::get_double(const std::string& key) const {
  const auto values = get_doubles(key);
  if (values.size() != 1) {
    throw Error(ErrorCode::kInvalidManifest,
                "key '" + key + "' expects a single number");
  }
  return values.front();
}

std::vector<double> KeyValueDocument::get_doubles(const std::string& key) const {
  std::vector<double> out;
  for (const auto token : split_ws(get(key))) out.push_back(parse_double(token));
  return out;
}

std::vector<std::size_t> KeyValueDocument::get_sizes(
    const std::string& key) const {
  std::vector<std::size_t> out;
  for (const auto token : split_ws(get(key))) {
    std::size_t value = 0;
    const auto* end = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(token.data(), end, value);
    if (ec != std::errc() || ptr != end) {
      throw Error(ErrorCode::kInvalidManifest,
                  "key '" + key + "': '" + std::string(token) +
                      "' is not a nonnegative integer");
    }
    out.push_back(value);
  }
  return out;
}

void KeyValueDocument::set(const std::string& key, std::string value) {
  if (!values_.contains(key)) order_.push_back(key);
  values_[key] = std::move(value);
}

std::string KeyValueDocument::serialize() const {
  std::string out;
  for (const auto& key : order_) {
    out += key;
    out += " = ";
    out += values_.at(key);
    out += '\n';
  }
  return out;
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

double parse_double(std::string_view token) {
  double value = 0.0;
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw Error(ErrorCode::kInvalidManifest,
                "'" + std::string(token) + "' is not a finite number");
  }
  return value;
}

}  // namespace cacscore
