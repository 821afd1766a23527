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

#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace cacscore {

/// Line-oriented `key = value` document. Blank lines and lines starting with
/// '#' are ignored; keys are unique.
class KeyValueDocument {
 public:
  [[nodiscard]] static KeyValueDocument parse(std::string_view text);

  [[nodiscard]] bool has(const std::string& key) const;
  /// Throws ErrorCode::kInvalidManifest when the key is absent.
  [[nodiscard]] const std::string& get(const std::string& key) const;
  [[nodiscard]] std::string get_or(const std::string& key,
                                   std::string fallback) const;
  [[nodiscard]] double get_double(const std::string& key) const;
  [[nodiscard]] std::vector<double> get_doubles(const std::string& key) const;
  [[nodiscard]] std::vector<std::size_t> get_sizes(const std::string& key) const;

  void set(const std::string& key, std::string value);
  /// Keys in insertion order, one per line.
  [[nodiscard]] std::string serialize() const;

 private:
  std::vector<std::string> order_;
  std::map<std::string, std::string> values_;
};

/// Shortest decimal text that parses back to the same double.
[[nodiscard]] std::string format_double(double value);

/// Strict decimal parse of the whole token; throws kInvalidManifest.
[[nodiscard]] double parse_double(std::string_view token);

}  // namespace cacscore
