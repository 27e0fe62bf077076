// Copyright 2026 The MLIC Codec Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Slicing of the latent into channel groups, the checkerboard split of each
// slice, and the symbol order both sides of the codec follow.
//
// Coding order (normative): slice-major; within a slice the anchor pass
// precedes the non-anchor pass; within a pass channel-major, then row-major
// raster over the pass's positions. Anchors are the positions with
// (row + col) even.

#ifndef MLIC_LATENT_LAYOUT_H_
#define MLIC_LATENT_LAYOUT_H_

#include <cstdint>
#include <vector>

#include "mlic/tensor.h"

namespace mlic {

struct SliceRange {
  int begin = 0;
  int end = 0;
  int size() const { return end - begin; }
  friend bool operator==(const SliceRange&, const SliceRange&) = default;
};

struct SlicePlan {
  int num_slices = 0;      // L
  int slice_channels = 0;  // S
  std::vector<SliceRange> ranges;
};

// Throws kUsage unless S divides M.
SlicePlan PlanSlices(int m_channels, int slice_channels);

struct Position {
  int row = 0;
  int col = 0;
  friend bool operator==(const Position&, const Position&) = default;
};

enum class Pass : uint8_t { kAnchor = 0, kNonAnchor = 1 };

inline bool IsAnchor(int row, int col) { return ((row + col) & 1) == 0; }

struct CheckerboardPartition {
  int height = 0;
  int width = 0;
  std::vector<Position> anchors;     // raster order
  std::vector<Position> nonanchors;  // raster order

  const std::vector<Position>& positions(Pass pass) const {
    return pass == Pass::kAnchor ? anchors : nonanchors;
  }
};

CheckerboardPartition Partition(int height, int width);

struct SymbolRef {
  int slice = 0;
  Pass pass = Pass::kAnchor;
  int channel = 0;  // within the slice
  int row = 0;
  int col = 0;
  friend bool operator==(const SymbolRef&, const SymbolRef&) = default;
};

using CodingOrder = std::vector<SymbolRef>;

CodingOrder MakeCodingOrder(const SlicePlan& plan,
                            const CheckerboardPartition& partition);

// Canonical byte form of an order, five little-endian u16 per symbol.
std::vector<uint8_t> SerializeOrder(const CodingOrder& order);

// (C, h, w) -> (C, n) values at `positions`.
Tensor Gather(const Tensor& grid, const std::vector<Position>& positions);
// (C, n) -> (C, h, w), zero outside `positions`.
Tensor Scatter(const Tensor& values, const std::vector<Position>& positions,
               int height, int width);
// Copy of `grid` with every position outside `pass` set to zero.
Tensor KeepPass(const Tensor& grid, Pass pass);

}  // namespace mlic

#endif  // MLIC_LATENT_LAYOUT_H_
