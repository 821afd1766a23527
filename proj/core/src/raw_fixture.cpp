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

#include "cacscore/raw_fixture.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>

#include "cacscore/error.hpp"
#include "cacscore/key_value.hpp"

namespace cacscore {
namespace {

constexpr std::string_view kBundleSeparator = "\n---\n";

std::string join_sizes(std::initializer_list<std::size_t> values) {
  std::string out;
  for (const auto v : values) {
    if (!out.empty()) out += ' ';
    out += std::to_string(v);
  }
  return out;
}

}  // namespace

VolumeManifest VolumeManifest::parse(std::string_view text) {
  const auto doc = KeyValueDocument::parse(text);
  VolumeManifest m;
  const auto shape = doc.get_sizes("shape");
  if (shape.size() != 3 || shape[0] == 0 || shape[1] == 0 || shape[2] == 0) {
    throw Error(ErrorCode::kInvalidManifest, "shape must be three positive integers");
  }
  m.shape = {shape[0], shape[1], shape[2]};
  const auto spacing = doc.get_doubles("spacing_mm");
  if (spacing.size() != 3 ||
      std::any_of(spacing.begin(), spacing.end(), [](double v) { return v <= 0.0; })) {
    throw Error(ErrorCode::kInvalidManifest, "spacing_mm must be three positive numbers");
  }
  m.spacing = {spacing[0], spacing[1], spacing[2]};
  const auto semantics = doc.get_or("value_semantics", "hu");
  if (semantics == "hu") {
    m.semantics = ValueSemantics::kHu;
  } else if (semantics == "raw") {
    m.semantics = ValueSemantics::kRaw;
  } else {
    throw Error(ErrorCode::kInvalidManifest,
                "value_semantics must be 'hu' or 'raw', got '" + semantics + "'");
  }
  if (doc.has("slope")) m.slope = doc.get_double("slope");
  if (doc.has("intercept")) m.intercept = doc.get_double("intercept");
  if (m.semantics == ValueSemantics::kRaw && (!doc.has("slope") || !doc.has("intercept"))) {
    throw Error(ErrorCode::kInvalidManifest, "raw semantics require slope and intercept");
  }
  const auto order = doc.get_or("byte_order", "little");
  if (order != "little") {
    throw Error(ErrorCode::kInvalidManifest,
                "byte_order must be 'little', got '" + order + "'");
  }
  m.payload_file = doc.get_or("payload", "");
  return m;
}

std::string VolumeManifest::serialize() const {
  KeyValueDocument doc;
  doc.set("shape", join_sizes({shape.slices, shape.rows, shape.cols}));
  doc.set("spacing_mm", format_double(spacing.slice_mm) + " " +
                            format_double(spacing.row_mm) + " " +
                            format_double(spacing.col_mm));
  doc.set("value_semantics", semantics == ValueSemantics::kHu ? "hu" : "raw");
  doc.set("slope", format_double(slope));
  doc.set("intercept", format_double(intercept));
  doc.set("byte_order", "little");
  if (!payload_file.empty()) doc.set("payload", payload_file);
  return doc.serialize();
}

Volume load_raw_volume(const VolumeManifest& manifest,
                       std::span<const std::uint8_t> payload) {
  const std::size_t voxels = manifest.shape.voxel_count();
  if (voxels == 0) {
    throw Error(ErrorCode::kInvalidManifest, "shape must be positive");
  }
  if (payload.size() != voxels * 2) {
    throw Error(ErrorCode::kLengthMismatch,
                "payload holds " + std::to_string(payload.size()) +
                    " bytes, manifest requires " + std::to_string(voxels * 2));
  }
  std::vector<std::int16_t> hu(voxels);
  for (std::size_t i = 0; i < voxels; ++i) {
    const auto v = static_cast<std::int16_t>(
        static_cast<std::uint16_t>(payload[2 * i] | (payload[2 * i + 1] << 8)));
    hu[i] = manifest.semantics == ValueSemantics::kHu
                ? v
                : to_hu(v, manifest.slope, manifest.intercept);
  }
  return Volume(manifest.shape, manifest.spacing, std::move(hu));
}

RawVolume save_raw_volume(const Volume& volume) {
  RawVolume out;
  out.manifest.shape = volume.shape();
  out.manifest.spacing = volume.spacing();
  out.manifest.semantics = ValueSemantics::kHu;
  const auto hu = volume.hu();
  out.payload.resize(hu.size() * 2);
  for (std::size_t i = 0; i < hu.size(); ++i) {
    const auto u = static_cast<std::uint16_t>(hu[i]);
    out.payload[2 * i] = static_cast<std::uint8_t>(u & 0xFF);
    out.payload[2 * i + 1] = static_cast<std::uint8_t>(u >> 8);
  }
  return out;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const std::filesystem::path& path,
                      std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIoError, "short write to " + path.string());
}

namespace {

std::filesystem::path payload_path(const std::filesystem::path& manifest,
                                   const std::string& payload_file) {
  if (!payload_file.empty()) return manifest.parent_path() / payload_file;
  auto p = manifest;
  p.replace_extension(".raw");
  return p;
}

std::string read_text(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  return {bytes.begin(), bytes.end()};
}

}  // namespace

Volume read_volume_files(const std::filesystem::path& manifest_path) {
  const auto manifest = VolumeManifest::parse(read_text(manifest_path));
  const auto payload = read_file_bytes(payload_path(manifest_path, manifest.payload_file));
  return load_raw_volume(manifest, payload);
}

void write_volume_files(const Volume& volume,
                        const std::filesystem::path& manifest_path) {
  auto raw = save_raw_volume(volume);
  auto payload = manifest_path;
  payload.replace_extension(".raw");
  raw.manifest.payload_file = payload.filename().string();
  const auto text = raw.manifest.serialize();
  write_file_bytes(manifest_path,
                   {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
  write_file_bytes(payload, raw.payload);
}

std::vector<std::uint8_t> encode_bundle(std::string_view manifest,
                                        std::span<const std::uint8_t> payload) {
  std::vector<std::uint8_t> out(manifest.begin(), manifest.end());
  while (!out.empty() && out.back() == '\n') out.pop_back();
  out.insert(out.end(), kBundleSeparator.begin(), kBundleSeparator.end());
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

Bundle decode_bundle(std::span<const std::uint8_t> bytes) {
  const auto it = std::search(bytes.begin(), bytes.end(), kBundleSeparator.begin(),
                              kBundleSeparator.end());
  if (it == bytes.end()) {
    throw Error(ErrorCode::kInvalidManifest, "bundle has no manifest separator");
  }
  Bundle b;
  b.manifest.assign(bytes.begin(), it);
  b.manifest.push_back('\n');
  b.payload.assign(it + static_cast<std::ptrdiff_t>(kBundleSeparator.size()),
                   bytes.end());
  return b;
}

std::vector<std::uint8_t> encode_volume_bundle(const Volume& volume) {
  const auto raw = save_raw_volume(volume);
  return encode_bundle(raw.manifest.serialize(), raw.payload);
}

Volume decode_volume_bundle(std::span<const std::uint8_t> bytes) {
  const auto bundle = decode_bundle(bytes);
  return load_raw_volume(VolumeManifest::parse(bundle.manifest), bundle.payload);
}

}  // namespace cacscore
