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

#include "cacscore/lesion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cacscore/error.hpp"

namespace cacscore {
namespace {

std::string shape_text(const Shape& s) {
  return std::to_string(s.slices) + "x" + std::to_string(s.rows) + "x" +
         std::to_string(s.cols);
}

}  // namespace

std::vector<Lesion> extract_lesions(const Volume& volume, const BinaryMask& mask,
                                    Connectivity conn,
                                    double min_component_area_mm2) {
  if (!(mask.shape() == volume.shape())) {
    throw Error(ErrorCode::kShapeMismatch, "mask " + shape_text(mask.shape()) +
                                               " does not match volume " +
                                               shape_text(volume.shape()));
  }
  const auto grid = label_components(mask, conn);
  const Shape& shape = grid.shape;
  const double pixel_area = volume.spacing().pixel_area_mm2();

  // Voxels per (component, slice), gathered in scan order.
  std::vector<std::vector<VoxelIndex>> voxels(grid.count + 1);
  for (std::size_t s = 0; s < shape.slices; ++s) {
    for (std::size_t r = 0; r < shape.rows; ++r) {
      for (std::size_t c = 0; c < shape.cols; ++c) {
        const auto label = grid.at(s, r, c);
        if (label != 0) {
          voxels[label].push_back({static_cast<long>(s), static_cast<long>(r),
                                   static_cast<long>(c)});
        }
      }
    }
  }

  std::vector<Lesion> lesions;
  for (std::uint32_t id = 1; id <= grid.count; ++id) {
    const auto& all = voxels[id];
    std::map<long, std::size_t> per_slice_count;
    for (const auto& v : all) ++per_slice_count[v.slice];

    Lesion lesion;
    lesion.id = id;
    for (const auto& v : all) {
      const double area = static_cast<double>(per_slice_count[v.slice]) * pixel_area;
      if (area < min_component_area_mm2) continue;
      lesion.voxels.push_back(v);
    }
    if (lesion.voxels.empty()) continue;

    VoxelIndex lo{std::numeric_limits<long>::max(), std::numeric_limits<long>::max(),
                  std::numeric_limits<long>::max()};
    VoxelIndex hi{std::numeric_limits<long>::min(), std::numeric_limits<long>::min(),
                  std::numeric_limits<long>::min()};
    std::map<long, std::size_t> kept_count;
    lesion.max_hu = std::numeric_limits<std::int16_t>::min();
    for (const auto& v : lesion.voxels) {
      const auto hu = volume.at(static_cast<std::size_t>(v.slice),
                                static_cast<std::size_t>(v.row),
                                static_cast<std::size_t>(v.col));
      ++kept_count[v.slice];
      auto [it, inserted] = lesion.per_slice_max_hu.try_emplace(v.slice, hu);
      if (!inserted) it->second = std::max(it->second, hu);
      lesion.max_hu = std::max(lesion.max_hu, hu);
      lo = {std::min(lo.slice, v.slice), std::min(lo.row, v.row), std::min(lo.col, v.col)};
      hi = {std::max(hi.slice, v.slice), std::max(hi.row, v.row), std::max(hi.col, v.col)};
    }
    for (const auto& [slice, n] : kept_count) {
      const double area = static_cast<double>(n) * pixel_area;
      lesion.per_slice_area_mm2[slice] = area;
      lesion.total_area_mm2 += area;
    }
    lesion.bounding_box = {lo, {hi.slice + 1, hi.row + 1, hi.col + 1}};
    lesions.push_back(std::move(lesion));
  }
  return lesions;
}

BinaryMask threshold_segment(const Volume& volume, double hu_threshold,
                             std::optional<VoxelBox> roi) {
  if (!std::isfinite(hu_threshold)) {
    throw Error(ErrorCode::kInvalidConfig, "HU threshold must be finite");
  }
  const Shape& shape = volume.shape();
  VoxelBox box{{0, 0, 0},
               {static_cast<long>(shape.slices), static_cast<long>(shape.rows),
                static_cast<long>(shape.cols)}};
  if (roi) {
    const auto& b = roi->begin;
    const auto& e = roi->end;
    if (b.slice < 0 || b.row < 0 || b.col < 0 || e.slice < b.slice ||
        e.row < b.row || e.col < b.col || e.slice > box.end.slice ||
        e.row > box.end.row || e.col > box.end.col) {
      throw Error(ErrorCode::kRoiOutOfBounds, "ROI exceeds volume " + shape_text(shape));
    }
    box = *roi;
  }
  BinaryMask mask(shape);
  for (long s = box.begin.slice; s < box.end.slice; ++s) {
    for (long r = box.begin.row; r < box.end.row; ++r) {
      for (long c = box.begin.col; c < box.end.col; ++c) {
        const auto su = static_cast<std::size_t>(s);
        const auto ru = static_cast<std::size_t>(r);
        const auto cu = static_cast<std::size_t>(c);
        if (static_cast<double>(volume.at(su, ru, cu)) >= hu_threshold) {
          mask.set(su, ru, cu, true);
        }
      }
    }
  }
  return mask;
}

BinaryMask apply_edit(const BinaryMask& mask, const MaskEdit& edit) {
  BinaryMask out = mask;
  if (const auto* remove = std::get_if<RemoveComponent>(&edit)) {
    const auto grid = label_components(mask, remove->connectivity);
    if (remove->id == 0 || remove->id > grid.count) {
      throw Error(ErrorCode::kUnknownComponent,
                  "component " + std::to_string(remove->id) + " does not exist (" +
                      std::to_string(grid.count) + " components)");
    }
    const Shape& shape = mask.shape();
    for (std::size_t s = 0; s < shape.slices; ++s) {
      for (std::size_t r = 0; r < shape.rows; ++r) {
        for (std::size_t c = 0; c < shape.cols; ++c) {
          if (grid.at(s, r, c) == remove->id) out.set(s, r, c, false);
        }
      }
    }
    return out;
  }
  const auto& paint = std::get<Paint>(edit);
  for (const auto& v : paint.voxels) {
    if (!mask.shape().contains(v.slice, v.row, v.col)) {
      throw Error(ErrorCode::kVoxelOutOfBounds,
                  "voxel (" + std::to_string(v.slice) + ", " + std::to_string(v.row) +
                      ", " + std::to_string(v.col) + ") outside " +
                      shape_text(mask.shape()));
    }
  }
  for (const auto& v : paint.voxels) out.set(v, paint.value);
  return out;
}

}  // namespace cacscore
