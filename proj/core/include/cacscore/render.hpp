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
#include <vector>

#include "cacscore/mask.hpp"
#include "cacscore/volume.hpp"

namespace cacscore {

struct Window {
  double center = 300.0;
  double width = 1500.0;
};

/// floor(clamp((hu - (center - width/2)) / width, 0, 1) * 255).
[[nodiscard]] std::uint8_t window_pixel(int hu, const Window& window);

/// 8-bit grayscale frame of one slice, row-major. Throws kInvalidArgument for
/// a non-positive width and kSliceOutOfRange for a bad index.
[[nodiscard]] std::vector<std::uint8_t> render_frame(const Volume& volume,
                                                     std::size_t slice,
                                                     const Window& window);

/// Horizontal run of mask voxels on one row.
struct Run {
  std::size_t row = 0;
  std::size_t col = 0;
  std::size_t length = 0;

  friend bool operator==(const Run&, const Run&) = default;
};

[[nodiscard]] std::vector<Run> overlay_runs(const BinaryMask& mask,
                                            std::size_t slice);

}  // namespace cacscore
