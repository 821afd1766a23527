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

#include "cacscore/mask.hpp"

#include <algorithm>
#include <fstream>

#include "cacscore/error.hpp"
#include "cacscore/key_value.hpp"
#include "cacscore/raw_fixture.hpp"

namespace cacscore {

BinaryMask::BinaryMask(Shape shape)
    : shape_(shape), values_(shape.voxel_count(), 0) {}

BinaryMask::BinaryMask(Shape shape, std::vector<std::uint8_t> values)
    : shape_(shape), values_(std::move(values)) {
  if (values_.size() != shape_.voxel_count()) {
    throw Error(ErrorCode::kLengthMismatch,
                "mask holds " + std::to_string(values_.size()) +
                    " voxels, shape requires " +
                    std::to_string(shape_.voxel_count()));
  }
  for (auto& v : values_) v = v != 0 ? 1 : 0;
}

std::size_t BinaryMask::count() const {
  return static_cast<std::size_t>(std::count(values_.begin(), values_.end(), 1));
}

bool BinaryMask::empty_slice(std::size_t s) const {
  const auto plane = slice(s);
  return std::none_of(plane.begin(), plane.end(), [](auto v) { return v != 0; });
}

MaskManifest MaskManifest::parse(std::string_view text) {
  const auto doc = KeyValueDocument::parse(text);
  MaskManifest m;
  const auto shape = doc.get_sizes("shape");
  if (shape.size() != 3 || shape[0] == 0 || shape[1] == 0 || shape[2] == 0) {
    throw Error(ErrorCode::kInvalidManifest, "shape must be three positive integers");
  }
  m.shape = {shape[0], shape[1], shape[2]};
  const auto order = doc.get_or("bit_order", "msb_first");
  if (order == "msb_first") {
    m.bit_order = BitOrder::kMsbFirst;
  } else if (order == "lsb_first") {
    m.bit_order = BitOrder::kLsbFirst;
  } else {
    throw Error(ErrorCode::kInvalidManifest,
                "bit_order must be msb_first or lsb_first, got '" + order + "'");
  }
  m.payload_file = doc.get_or("payload", "");
  return m;
}

std::string MaskManifest::serialize() const {
  KeyValueDocument doc;
  doc.set("shape", std::to_string(shape.slices) + " " + std::to_string(shape.rows) +
                       " " + std::to_string(shape.cols));
  doc.set("bit_order", bit_order == BitOrder::kMsbFirst ? "msb_first" : "lsb_first");
  if (!payload_file.empty()) doc.set("payload", payload_file);
  return doc.serialize();
}

BinaryMask load_mask(const MaskManifest& manifest,
                     std::span<const std::uint8_t> payload) {
  const std::size_t voxels = manifest.shape.voxel_count();
  const std::size_t expected = (voxels + 7) / 8;
  if (payload.size() != expected) {
    throw Error(ErrorCode::kLengthMismatch,
                "mask payload holds " + std::to_string(payload.size()) +
                    " bytes, shape requires " + std::to_string(expected));
  }
  std::vector<std::uint8_t> values(voxels);
  for (std::size_t i = 0; i < voxels; ++i) {
    const int bit = manifest.bit_order == BitOrder::kMsbFirst
                        ? 7 - static_cast<int>(i % 8)
                        : static_cast<int>(i % 8);
    values[i] = (payload[i / 8] >> bit) & 1u;
  }
  if (voxels % 8 != 0) {
    const int used = static_cast<int>(voxels % 8);
    const std::uint8_t used_mask =
        manifest.bit_order == BitOrder::kMsbFirst
            ? static_cast<std::uint8_t>(0xFF << (8 - used))
            : static_cast<std::uint8_t>((1u << used) - 1);
    if ((payload.back() & ~used_mask) != 0) {
      throw Error(ErrorCode::kInvalidManifest, "mask padding bits are not zero");
    }
  }
  return BinaryMask(manifest.shape, std::move(values));
}

PackedMask save_mask(const BinaryMask& mask, BitOrder order) {
  PackedMask out;
  out.manifest.shape = mask.shape();
  out.manifest.bit_order = order;
  const auto values = mask.values();
  out.payload.assign((values.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] == 0) continue;
    const int bit = order == BitOrder::kMsbFirst ? 7 - static_cast<int>(i % 8)
                                                 : static_cast<int>(i % 8);
    out.payload[i / 8] |= static_cast<std::uint8_t>(1u << bit);
  }
  return out;
}

BinaryMask read_mask_files(const std::filesystem::path& manifest_path) {
  const auto text_bytes = read_file_bytes(manifest_path);
  const auto manifest =
      MaskManifest::parse(std::string(text_bytes.begin(), text_bytes.end()));
  std::filesystem::path payload;
  if (!manifest.payload_file.empty()) {
    payload = manifest_path.parent_path() / manifest.payload_file;
  } else {
    payload = manifest_path;
    payload.replace_extension(".bits");
  }
  return load_mask(manifest, read_file_bytes(payload));
}

void write_mask_files(const BinaryMask& mask,
                      const std::filesystem::path& manifest_path, BitOrder order) {
  auto packed = save_mask(mask, order);
  auto payload = manifest_path;
  payload.replace_extension(".bits");
  packed.manifest.payload_file = payload.filename().string();
  const auto text = packed.manifest.serialize();
  write_file_bytes(manifest_path,
                   {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
  write_file_bytes(payload, packed.payload);
}

std::vector<std::uint8_t> encode_mask_bundle(const BinaryMask& mask) {
  const auto packed = save_mask(mask);
  return encode_bundle(packed.manifest.serialize(), packed.payload);
}

BinaryMask decode_mask_bundle(std::span<const std::uint8_t> bytes) {
  const auto bundle = decode_bundle(bytes);
  return load_mask(MaskManifest::parse(bundle.manifest), bundle.payload);
}

std::string slice_to_pgm(const BinaryMask& mask, std::size_t s) {
  const auto& shape = mask.shape();
  if (s >= shape.slices) {
    throw Error(ErrorCode::kSliceOutOfRange, "slice " + std::to_string(s));
  }
  std::string out = "P2\n" + std::to_string(shape.cols) + " " +
                    std::to_string(shape.rows) + "\n255\n";
  for (std::size_t r = 0; r < shape.rows; ++r) {
    for (std::size_t c = 0; c < shape.cols; ++c) {
      if (c > 0) out += ' ';
      out += mask.at(s, r, c) ? "255" : "0";
    }
    out += '\n';
  }
  return out;
}

std::vector<std::filesystem::path> export_pgm_slices(
    const BinaryMask& mask, const std::filesystem::path& dir,
    const std::string& prefix) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> paths;
  const auto width = std::to_string(mask.shape().slices).size();
  for (std::size_t s = 0; s < mask.shape().slices; ++s) {
    auto index = std::to_string(s);
    index.insert(0, width - index.size(), '0');
    const auto path = dir / (prefix + "_" + index + ".pgm");
    const auto text = slice_to_pgm(mask, s);
    write_file_bytes(path,
                     {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
    paths.push_back(path);
  }
  return paths;
}

}  // namespace cacscore
