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

#include "cacscore/components.hpp"

#include <array>
#include <numeric>
#include <string>

#include "cacscore/error.hpp"

namespace cacscore {
namespace {

struct Offset {
  int ds;
  int dr;
  int dc;
};

// Neighbours already visited by a slice/row/col raster scan.
std::vector<Offset> backward_offsets(Connectivity conn) {
  std::vector<Offset> out;
  for (int ds = -1; ds <= 0; ++ds) {
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        const bool before = ds < 0 || (ds == 0 && (dr < 0 || (dr == 0 && dc < 0)));
        if (before && conn.connects(ds, dr, dc)) out.push_back({ds, dr, dc});
      }
    }
  }
  return out;
}

class DisjointSet {
 public:
  std::uint32_t make() {
    parent_.push_back(static_cast<std::uint32_t>(parent_.size()));
    return parent_.back();
  }
  std::uint32_t find(std::uint32_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    // Keep the smaller (earlier) provisional label as root.
    if (a < b) {
      parent_[b] = a;
    } else {
      parent_[a] = b;
    }
  }
  [[nodiscard]] std::size_t size() const { return parent_.size(); }

 private:
  std::vector<std::uint32_t> parent_;
};

}  // namespace

bool Connectivity::connects(int ds, int dr, int dc) const {
  if (ds == 0 && dr == 0 && dc == 0) return false;
  if (ds == 0) {
    if (in_plane == InPlaneConnectivity::kFour) return dr == 0 || dc == 0;
    return true;
  }
  switch (cross_slice) {
    case CrossSliceConnectivity::kNone: return false;
    case CrossSliceConnectivity::kFace: return dr == 0 && dc == 0;
    case CrossSliceConnectivity::kFull: return true;
  }
  return false;
}

std::string_view to_string(InPlaneConnectivity value) {
  return value == InPlaneConnectivity::kFour ? "four" : "eight";
}

std::string_view to_string(CrossSliceConnectivity value) {
  switch (value) {
    case CrossSliceConnectivity::kNone: return "none";
    case CrossSliceConnectivity::kFace: return "face";
    case CrossSliceConnectivity::kFull: return "full";
  }
  return "none";
}

InPlaneConnectivity parse_in_plane(std::string_view text) {
  if (text == "four" || text == "4") return InPlaneConnectivity::kFour;
  if (text == "eight" || text == "8") return InPlaneConnectivity::kEight;
  throw Error(ErrorCode::kInvalidConfig,
              "in_plane must be four or eight, got '" + std::string(text) + "'");
}

CrossSliceConnectivity parse_cross_slice(std::string_view text) {
  if (text == "none") return CrossSliceConnectivity::kNone;
  if (text == "face") return CrossSliceConnectivity::kFace;
  if (text == "full") return CrossSliceConnectivity::kFull;
  throw Error(ErrorCode::kInvalidConfig,
              "cross_slice must be none, face or full, got '" + std::string(text) + "'");
}

LabelGrid label_components(const BinaryMask& mask, Connectivity conn) {
  const Shape shape = mask.shape();
  LabelGrid grid;
  grid.shape = shape;
  grid.labels.assign(shape.voxel_count(), 0);
  const auto offsets = backward_offsets(conn);
  const auto values = mask.values();

  // Pass 1: provisional labels (1-based; slot 0 of the set is background).
  DisjointSet sets;
  sets.make();
  for (std::size_t s = 0; s < shape.slices; ++s) {
    for (std::size_t r = 0; r < shape.rows; ++r) {
      for (std::size_t c = 0; c < shape.cols; ++c) {
        const std::size_t idx = shape.index(s, r, c);
        if (values[idx] == 0) continue;
        std::uint32_t label = 0;
        for (const auto& o : offsets) {
          const long ns = static_cast<long>(s) + o.ds;
          const long nr = static_cast<long>(r) + o.dr;
          const long nc = static_cast<long>(c) + o.dc;
          if (!shape.contains(ns, nr, nc)) continue;
          const std::uint32_t n = grid.labels[shape.index(
              static_cast<std::size_t>(ns), static_cast<std::size_t>(nr),
              static_cast<std::size_t>(nc))];
          if (n == 0) continue;
          if (label == 0) {
            label = n;
          } else {
            sets.unite(label, n);
          }
        }
        grid.labels[idx] = label != 0 ? label : sets.make();
      }
    }
  }

  // Pass 2: resolve roots and renumber in first-encounter order.
  std::vector<std::uint32_t> final_label(sets.size(), 0);
  std::uint32_t next = 0;
  for (auto& label : grid.labels) {
    if (label == 0) continue;
    const auto root = sets.find(label);
    if (final_label[root] == 0) final_label[root] = ++next;
    label = final_label[root];
  }
  grid.count = next;
  return grid;
}

}  // namespace cacscore
