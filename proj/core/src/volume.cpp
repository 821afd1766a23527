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

#include "cacscore/volume.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cacscore/error.hpp"

namespace cacscore {
namespace {

bool nearly_equal(double a, double b, double rel_tol) {
  return std::abs(a - b) <= rel_tol * std::max(std::abs(a), std::abs(b));
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const auto n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

Volume::Volume(Shape shape, Spacing spacing, std::vector<std::int16_t> hu,
               std::vector<std::size_t> slice_order,
               std::vector<double> z_positions_mm)
    : shape_(shape),
      spacing_(spacing),
      hu_(std::move(hu)),
      slice_order_(std::move(slice_order)),
      z_positions_mm_(std::move(z_positions_mm)) {
  if (hu_.size() != shape_.voxel_count()) {
    throw Error(ErrorCode::kLengthMismatch,
                "volume data holds " + std::to_string(hu_.size()) +
                    " voxels, shape requires " +
                    std::to_string(shape_.voxel_count()));
  }
  if (slice_order_.empty()) {
    slice_order_.resize(shape_.slices);
    std::iota(slice_order_.begin(), slice_order_.end(), std::size_t{0});
  }
  if (z_positions_mm_.empty()) {
    z_positions_mm_.resize(shape_.slices);
    for (std::size_t s = 0; s < shape_.slices; ++s) {
      z_positions_mm_[s] = static_cast<double>(s) * spacing_.slice_mm;
    }
  }
  if (slice_order_.size() != shape_.slices ||
      z_positions_mm_.size() != shape_.slices) {
    throw Error(ErrorCode::kLengthMismatch,
                "per-slice metadata does not match the slice count");
  }
}

Volume Volume::with_spacing(Spacing spacing) const {
  Volume copy = *this;
  copy.spacing_ = spacing;
  return copy;
}

std::int16_t to_hu(double raw, double slope, double intercept) {
  const double value = std::round(slope * raw + intercept);
  constexpr double lo = std::numeric_limits<std::int16_t>::min();
  constexpr double hi = std::numeric_limits<std::int16_t>::max();
  if (std::isnan(value)) return 0;
  return static_cast<std::int16_t>(std::clamp(value, lo, hi));
}

Volume assemble_volume(std::span<const SliceRecord> slices) {
  if (slices.empty()) {
    throw Error(ErrorCode::kInconsistentGeometry, "no slices to assemble");
  }
  const auto& first = slices.front();
  for (std::size_t i = 0; i < slices.size(); ++i) {
    const auto& s = slices[i];
    if (s.rows == 0 || s.cols == 0 || s.raw_pixels.size() != s.rows * s.cols) {
      throw Error(ErrorCode::kInconsistentGeometry,
                  "slice " + std::to_string(i) + " has an invalid pixel grid");
    }
    if (s.rows != first.rows || s.cols != first.cols) {
      throw Error(ErrorCode::kInconsistentGeometry,
                  "slice " + std::to_string(i) + " is " +
                      std::to_string(s.rows) + "x" + std::to_string(s.cols) +
                      ", expected " + std::to_string(first.rows) + "x" +
                      std::to_string(first.cols));
    }
    if (!nearly_equal(s.row_spacing_mm, first.row_spacing_mm, 1e-4) ||
        !nearly_equal(s.col_spacing_mm, first.col_spacing_mm, 1e-4)) {
      throw Error(ErrorCode::kInconsistentGeometry,
                  "slice " + std::to_string(i) + " has a different pixel spacing");
    }
  }

  std::vector<std::size_t> order(slices.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& sa = slices[a];
    const auto& sb = slices[b];
    if (sa.z_position_mm != sb.z_position_mm) {
      return sa.z_position_mm < sb.z_position_mm;
    }
    return sa.instance_number < sb.instance_number;
  });
  for (std::size_t i = 1; i < order.size(); ++i) {
    const auto& a = slices[order[i - 1]];
    const auto& b = slices[order[i]];
    if (a.z_position_mm == b.z_position_mm &&
        a.instance_number == b.instance_number) {
      throw Error(ErrorCode::kDuplicatePosition,
                  "two slices at z=" + std::to_string(b.z_position_mm) +
                      " with instance number " +
                      std::to_string(b.instance_number));
    }
  }

  const Shape shape{slices.size(), first.rows, first.cols};
  std::vector<std::int16_t> hu(shape.voxel_count());
  std::vector<double> z(slices.size());
  std::vector<double> gaps;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& rec = slices[order[i]];
    z[i] = rec.z_position_mm;
    if (i > 0) gaps.push_back(z[i] - z[i - 1]);
    auto* out = hu.data() + i * shape.slice_size();
    for (std::size_t p = 0; p < rec.raw_pixels.size(); ++p) {
      out[p] = to_hu(rec.raw_pixels[p], rec.rescale_slope, rec.rescale_intercept);
    }
  }

  Spacing spacing{first.slice_thickness_mm, first.row_spacing_mm,
                  first.col_spacing_mm};
  std::vector<std::string> warnings;
  if (!gaps.empty()) {
    const double gap = median(gaps);
    if (gap > 0.0) {
      spacing.slice_mm = gap;
    } else {
      warnings.emplace_back(
          "slice positions coincide; using the recorded slice thickness");
    }
  }

  Volume volume(shape, spacing, std::move(hu), std::move(order), std::move(z));
  for (const auto& rec : slices) {
    for (const auto& w : rec.warnings) {
      if (std::find(warnings.begin(), warnings.end(), w) == warnings.end()) {
        warnings.push_back(w);
      }
    }
  }
  for (auto& w : warnings) volume.add_warning(std::move(w));
  return volume;
}

}  // namespace cacscore
