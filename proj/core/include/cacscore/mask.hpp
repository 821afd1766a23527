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

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cacscore/volume.hpp"

namespace cacscore {

struct VoxelIndex {
  long slice = 0;
  long row = 0;
  long col = 0;

  friend auto operator<=>(const VoxelIndex&, const VoxelIndex&) = default;
};

/// Half-open voxel box [begin, end) per axis.
struct VoxelBox {
  VoxelIndex begin;
  VoxelIndex end;

  friend bool operator==(const VoxelBox&, const VoxelBox&) = default;
};

/// Per-voxel calcification labels aligned to a Volume. Stored one byte per
/// voxel (0/1); the wire format packs bits.
class BinaryMask {
 public:
  BinaryMask() = default;
  explicit BinaryMask(Shape shape);
  BinaryMask(Shape shape, std::vector<std::uint8_t> values);

  [[nodiscard]] const Shape& shape() const { return shape_; }
  [[nodiscard]] bool at(std::size_t s, std::size_t r, std::size_t c) const {
    return values_[shape_.index(s, r, c)] != 0;
  }
  [[nodiscard]] bool at(const VoxelIndex& v) const {
    return at(static_cast<std::size_t>(v.slice), static_cast<std::size_t>(v.row),
              static_cast<std::size_t>(v.col));
  }
  void set(std::size_t s, std::size_t r, std::size_t c, bool value) {
    values_[shape_.index(s, r, c)] = value ? 1 : 0;
  }
  void set(const VoxelIndex& v, bool value) {
    set(static_cast<std::size_t>(v.slice), static_cast<std::size_t>(v.row),
        static_cast<std::size_t>(v.col), value);
  }
  [[nodiscard]] std::span<const std::uint8_t> values() const { return values_; }
  [[nodiscard]] std::span<const std::uint8_t> slice(std::size_t s) const {
    return std::span<const std::uint8_t>(values_).subspan(
        s * shape_.slice_size(), shape_.slice_size());
  }
  [[nodiscard]] std::size_t count() const;
  [[nodiscard]] bool empty_slice(std::size_t s) const;

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  Shape shape_;
  std::vector<std::uint8_t> values_;
};

enum class BitOrder { kMsbFirst, kLsbFirst };

// Mask wire format: manifest
//
//   shape = <slices> <rows> <cols>
//   bit_order = msb_first | lsb_first
//
// followed by ceil(voxels / 8) bytes of row-major packed bits; unused bits in
// the final byte are zero.
struct MaskManifest {
  Shape shape;
  BitOrder bit_order = BitOrder::kMsbFirst;
  std::string payload_file;

  [[nodiscard]] static MaskManifest parse(std::string_view text);
  [[nodiscard]] std::string serialize() const;
};

struct PackedMask {
  MaskManifest manifest;
  std::vector<std::uint8_t> payload;
};

[[nodiscard]] BinaryMask load_mask(const MaskManifest& manifest,
                                   std::span<const std::uint8_t> payload);
[[nodiscard]] PackedMask save_mask(const BinaryMask& mask,
                                   BitOrder order = BitOrder::kMsbFirst);

[[nodiscard]] BinaryMask read_mask_files(const std::filesystem::path& manifest);
void write_mask_files(const BinaryMask& mask,
                      const std::filesystem::path& manifest,
                      BitOrder order = BitOrder::kMsbFirst);

[[nodiscard]] std::vector<std::uint8_t> encode_mask_bundle(
    const BinaryMask& mask);
[[nodiscard]] BinaryMask decode_mask_bundle(std::span<const std::uint8_t> bytes);

/// Plain-text PGM (P2) of one slice, 0 for background and 255 for mask.
[[nodiscard]] std::string slice_to_pgm(const BinaryMask& mask, std::size_t s);
/// Writes `<prefix>_<slice>.pgm` for every slice; returns the paths.
std::vector<std::filesystem::path> export_pgm_slices(
    const BinaryMask& mask, const std::filesystem::path& dir,
    const std::string& prefix);

}  // namespace cacscore
