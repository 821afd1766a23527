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

#include "cacscore/render.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cacscore/error.hpp"

namespace cacscore {

std::uint8_t window_pixel(int hu, const Window& window) {
  const double lower = window.center - window.width / 2.0;
  const double t = std::clamp((static_cast<double>(hu) - lower) / window.width, 0.0, 1.0);
  return static_cast<std::uint8_t>(std::floor(t * 255.0));
}

std::vector<std::uint8_t> render_frame(const Volume& volume, std::size_t slice,
                                       const Window& window) {
  if (!(window.width > 0.0) || !std::isfinite(window.center)) {
    throw Error(ErrorCode::kInvalidArgument, "window width must be positive");
  }
  if (slice >= volume.shape().slices) {
    throw Error(ErrorCode::kSliceOutOfRange,
                "slice " + std::to_string(slice) + " of " +
                    std::to_string(volume.shape().slices));
  }
  const auto hu = volume.slice(slice);
  std::vector<std::uint8_t> frame(hu.size());
  std::transform(hu.begin(), hu.end(), frame.begin(),
                 [&](std::int16_t v) { return window_pixel(v, window); });
  return frame;
}

std::vector<Run> overlay_runs(const BinaryMask& mask, std::size_t slice) {
  const Shape& shape = mask.shape();
  if (slice >= shape.slices) {
    throw Error(ErrorCode::kSliceOutOfRange,
                "slice " + std::to_string(slice) + " of " + std::to_string(shape.slices));
  }
  std::vector<Run> runs;
  for (std::size_t r = 0; r < shape.rows; ++r) {
    std::size_t c = 0;
    while (c < shape.cols) {
      if (!mask.at(slice, r, c)) {
        ++c;
        continue;
      }
      const std::size_t start = c;
      while (c < shape.cols && mask.at(slice, r, c)) ++c;
      runs.push_back({r, start, c - start});
    }
  }
  return runs;
}

}  // namespace cacscore
