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

// Minimal DICOM reader/writer for single-frame, uncompressed CT slices.
//
// Supported transfer syntaxes are implicit VR little endian
// (1.2.840.10008.1.2) and explicit VR little endian (1.2.840.10008.1.2.1).
// Files may carry the 128-byte preamble and "DICM" magic with a group 0002
// meta header, or start directly at the first data element. Anything else,
// including encapsulated pixel data, is rejected with
// ErrorCode::kUnsupportedTransferSyntax.

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "cacscore/volume.hpp"

namespace cacscore::dicom {

inline constexpr char kImplicitVrLittleEndian[] = "1.2.840.10008.1.2";
inline constexpr char kExplicitVrLittleEndian[] = "1.2.840.10008.1.2.1";

struct Tag {
  std::uint16_t group = 0;
  std::uint16_t element = 0;

  [[nodiscard]] constexpr std::uint32_t key() const {
    return (static_cast<std::uint32_t>(group) << 16) | element;
  }
  friend constexpr bool operator==(Tag, Tag) = default;
};

namespace tags {
inline constexpr Tag kTransferSyntaxUid{0x0002, 0x0010};
inline constexpr Tag kSliceThickness{0x0018, 0x0050};
inline constexpr Tag kInstanceNumber{0x0020, 0x0013};
inline constexpr Tag kImagePositionPatient{0x0020, 0x0032};
inline constexpr Tag kSamplesPerPixel{0x0028, 0x0002};
inline constexpr Tag kRows{0x0028, 0x0010};
inline constexpr Tag kColumns{0x0028, 0x0011};
inline constexpr Tag kPixelSpacing{0x0028, 0x0030};
inline constexpr Tag kBitsAllocated{0x0028, 0x0100};
inline constexpr Tag kPixelRepresentation{0x0028, 0x0103};
inline constexpr Tag kRescaleIntercept{0x0028, 0x1052};
inline constexpr Tag kRescaleSlope{0x0028, 0x1053};
inline constexpr Tag kPixelData{0x7FE0, 0x0010};
}  // namespace tags

[[nodiscard]] SliceRecord parse_slice(std::span<const std::uint8_t> bytes);

struct WriteOptions {
  bool explicit_vr = true;
  // Without the preamble the file starts at the first dataset element.
  bool with_preamble = true;
  bool write_slice_thickness = true;
  bool write_rescale = true;
};

/// Serializes a record so that parse_slice() returns it field for field.
[[nodiscard]] std::vector<std::uint8_t> write_slice(
    const SliceRecord& record, const WriteOptions& options = {});

/// Parses every regular file in `dir` and assembles the series. Files are
/// parsed in parallel; ordering comes from the slice geometry only.
[[nodiscard]] Volume load_series(const std::filesystem::path& dir);

}  // namespace cacscore::dicom
