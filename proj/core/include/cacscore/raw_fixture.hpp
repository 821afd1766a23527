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

// Raw volume fixture: a textual manifest plus little-endian int16 payload in
// slice-major, row-major order. Example manifest:
//
//   shape = 2 4 4
//   spacing_mm = 3 0.5 0.5
//   value_semantics = hu
//   slope = 1
//   intercept = 0
//   byte_order = little
//
// With `value_semantics = raw` the stored values are rescaled by slope and
// intercept on load; with `hu` they are taken verbatim.

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cacscore/volume.hpp"

namespace cacscore {

enum class ValueSemantics { kHu, kRaw };

struct VolumeManifest {
  Shape shape;
  Spacing spacing;
  ValueSemantics semantics = ValueSemantics::kHu;
  double slope = 1.0;
  double intercept = 0.0;
  // Optional payload file name, resolved relative to the manifest file.
  std::string payload_file;

  [[nodiscard]] static VolumeManifest parse(std::string_view text);
  [[nodiscard]] std::string serialize() const;
};

[[nodiscard]] Volume load_raw_volume(const VolumeManifest& manifest,
                                     std::span<const std::uint8_t> payload);

struct RawVolume {
  VolumeManifest manifest;
  std::vector<std::uint8_t> payload;
};

/// Always writes HU semantics; load_raw_volume(save_raw_volume(v)) == v.
[[nodiscard]] RawVolume save_raw_volume(const Volume& volume);

/// Reads `<manifest>` and its payload (the `payload` key, or the manifest
/// path with extension replaced by ".raw").
[[nodiscard]] Volume read_volume_files(const std::filesystem::path& manifest);
void write_volume_files(const Volume& volume,
                        const std::filesystem::path& manifest);

// Single-buffer framing for transport: manifest text, a line "---", then the
// payload bytes. Used by the mask-provider wire contract and HTTP uploads.
[[nodiscard]] std::vector<std::uint8_t> encode_bundle(
    std::string_view manifest, std::span<const std::uint8_t> payload);

struct Bundle {
  std::string manifest;
  std::vector<std::uint8_t> payload;
};
[[nodiscard]] Bundle decode_bundle(std::span<const std::uint8_t> bytes);

[[nodiscard]] std::vector<std::uint8_t> encode_volume_bundle(
    const Volume& volume);
[[nodiscard]] Volume decode_volume_bundle(std::span<const std::uint8_t> bytes);

[[nodiscard]] std::vector<std::uint8_t> read_file_bytes(
    const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path,
                      std::span<const std::uint8_t> bytes);

}  // namespace cacscore
