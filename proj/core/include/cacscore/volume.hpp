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

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace cacscore {

/// Agatston reference slice thickness; also the fallback when a slice
/// carries no SliceThickness element.
inline constexpr double kReferenceSliceThicknessMm = 3.0;

/// Grid extent in (slice, row, col) order.
struct Shape {
  std::size_t slices = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;

  [[nodiscard]] std::size_t voxel_count() const { return slices * rows * cols; }
  [[nodiscard]] std::size_t slice_size() const { return rows * cols; }
  [[nodiscard]] std::size_t index(std::size_t s, std::size_t r,
                                  std::size_t c) const {
    return (s * rows + r) * cols + c;
  }
  [[nodiscard]] bool contains(long s, long r, long c) const {
    return s >= 0 && r >= 0 && c >= 0 && static_cast<std::size_t>(s) < slices &&
           static_cast<std::size_t>(r) < rows &&
           static_cast<std::size_t>(c) < cols;
  }

  friend bool operator==(const Shape&, const Shape&) = default;
};

/// Physical voxel spacing in millimetres, (slice, row, col) order.
struct Spacing {
  double slice_mm = kReferenceSliceThicknessMm;
  double row_mm = 1.0;
  double col_mm = 1.0;

  [[nodiscard]] double pixel_area_mm2() const { return row_mm * col_mm; }

  friend bool operator==(const Spacing&, const Spacing&) = default;
};

/// One decoded CT slice before volume assembly.
struct SliceRecord {
  std::size_t rows = 0;
  std::size_t cols = 0;
  double row_spacing_mm = 1.0;
  double col_spacing_mm = 1.0;
  double slice_thickness_mm = kReferenceSliceThicknessMm;
  double rescale_slope = 1.0;
  double rescale_intercept = 0.0;
  double z_position_mm = 0.0;
  int instance_number = 0;
  std::vector<std::int16_t> raw_pixels;
  // Defaults applied while decoding (missing thickness, rescale, ...).
  std::vector<std::string> warnings;

  friend bool operator==(const SliceRecord&, const SliceRecord&) = default;
};

/// Immutable HU grid with geometry. Slices are stored in ascending z order.
class Volume {
 public:
  Volume() = default;
  Volume(Shape shape, Spacing spacing, std::vector<std::int16_t> hu,
         std::vector<std::size_t> slice_order = {},
         std::vector<double> z_positions_mm = {});

  [[nodiscard]] const Shape& shape() const { return shape_; }
  [[nodiscard]] const Spacing& spacing() const { return spacing_; }
  [[nodiscard]] std::span<const std::int16_t> hu() const { return hu_; }
  [[nodiscard]] std::int16_t at(std::size_t s, std::size_t r,
                                std::size_t c) const {
    return hu_[shape_.index(s, r, c)];
  }
  [[nodiscard]] std::span<const std::int16_t> slice(std::size_t s) const {
    return std::span<const std::int16_t>(hu_).subspan(s * shape_.slice_size(),
                                                      shape_.slice_size());
  }
  /// Index into the assembler's input list for each stored slice.
  [[nodiscard]] const std::vector<std::size_t>& slice_order() const {
    return slice_order_;
  }
  [[nodiscard]] const std::vector<double>& z_positions_mm() const {
    return z_positions_mm_;
  }
  [[nodiscard]] const std::vector<std::string>& warnings() const {
    return warnings_;
  }
  void add_warning(std::string warning) {
    warnings_.push_back(std::move(warning));
  }

  /// Same grid with a different spacing; used by scaling checks and tests.
  [[nodiscard]] Volume with_spacing(Spacing spacing) const;

 private:
  Shape shape_;
  Spacing spacing_;
  std::vector<std::int16_t> hu_;
  std::vector<std::size_t> slice_order_;
  std::vector<double> z_positions_mm_;
  std::vector<std::string> warnings_;
};

/// slope * raw + intercept, rounded to nearest (ties away from zero) and
/// saturated to the int16 range.
[[nodiscard]] std::int16_t to_hu(double raw, double slope, double intercept);

/// Sorts slices by ascending z (instance number breaks ties) and stacks them.
/// The slice spacing is the median inter-slice gap when there are at least
/// two slices with distinct positions, otherwise the record thickness.
[[nodiscard]] Volume assemble_volume(std::span<const SliceRecord> slices);

}  // namespace cacscore
