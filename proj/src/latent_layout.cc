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

#include "mlic/latent_layout.h"

#include "mlic/bytes.h"
#include "mlic/error.h"

namespace mlic {

SlicePlan PlanSlices(int m_channels, int slice_channels) {
  if (slice_channels <= 0 || m_channels <= 0 || m_channels % slice_channels != 0) {
    Fail(ErrorKind::kUsage, "slice width " + std::to_string(slice_channels) +
                                " does not divide " +
                                std::to_string(m_channels) + " channels");
  }
  SlicePlan plan;
  plan.slice_channels = slice_channels;
  plan.num_slices = m_channels / slice_channels;
  for (int i = 0; i < plan.num_slices; ++i) {
    plan.ranges.push_back({i * slice_channels, (i + 1) * slice_channels});
  }
  return plan;
}

CheckerboardPartition Partition(int height, int width) {
  Check(height >= 1 && width >= 1, ErrorKind::kShape,
        "Partition: grid must be at least 1x1");
  CheckerboardPartition p;
  p.height = height;
  p.width = width;
  p.anchors.reserve((static_cast<size_t>(height) * width + 1) / 2);
  p.nonanchors.reserve(static_cast<size_t>(height) * width / 2);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      (IsAnchor(r, c) ? p.anchors : p.nonanchors).push_back({r, c});
    }
  }
  return p;
}

CodingOrder MakeCodingOrder(const SlicePlan& plan,
                            const CheckerboardPartition& partition) {
  CodingOrder order;
  order.reserve(static_cast<size_t>(plan.num_slices) * plan.slice_channels *
                partition.height * partition.width);
  for (int i = 0; i < plan.num_slices; ++i) {
    for (Pass pass : {Pass::kAnchor, Pass::kNonAnchor}) {
      for (int c = 0; c < plan.ranges[i].size(); ++c) {
        for (const Position& p : partition.positions(pass)) {
          order.push_back({i, pass, c, p.row, p.col});
        }
      }
    }
  }
  return order;
}

std::vector<uint8_t> SerializeOrder(const CodingOrder& order) {
  ByteWriter w;
  for (const SymbolRef& s : order) {
    w.U16(static_cast<uint16_t>(s.slice));
    w.U16(static_cast<uint16_t>(s.pass));
    w.U16(static_cast<uint16_t>(s.channel));
    w.U16(static_cast<uint16_t>(s.row));
    w.U16(static_cast<uint16_t>(s.col));
  }
  return w.Take();
}

Tensor Gather(const Tensor& grid, const std::vector<Position>& positions) {
  Check(grid.rank() == 3, ErrorKind::kShape, "Gather: expected (C, h, w)");
  const int c = grid.channels();
  const int n = static_cast<int>(positions.size());
  Tensor out({c, n});
  for (int ch = 0; ch < c; ++ch) {
    for (int j = 0; j < n; ++j) {
      out[static_cast<size_t>(ch) * n + j] =
          grid.at(ch, positions[j].row, positions[j].col);
    }
  }
  return out;
}

Tensor Scatter(const Tensor& values, const std::vector<Position>& positions,
               int height, int width) {
  const int n = static_cast<int>(positions.size());
  Check(values.rank() == 2 && values.dim(1) == n, ErrorKind::kShape,
        "Scatter: values " + ShapeString(values.shape()) + " for " +
            std::to_string(n) + " positions");
  const int c = values.dim(0);
  Tensor out({c, height, width});
  for (int ch = 0; ch < c; ++ch) {
    for (int j = 0; j < n; ++j) {
      out.at(ch, positions[j].row, positions[j].col) =
          values[static_cast<size_t>(ch) * n + j];
    }
  }
  return out;
}

Tensor KeepPass(const Tensor& grid, Pass pass) {
  Check(grid.rank() == 3, ErrorKind::kShape, "KeepPass: expected (C, h, w)");
  Tensor out = grid;
  const bool keep_anchor = pass == Pass::kAnchor;
  for (int ch = 0; ch < grid.channels(); ++ch) {
    for (int r = 0; r < grid.height(); ++r) {
      for (int c = 0; c < grid.width(); ++c) {
        if (IsAnchor(r, c) != keep_anchor) out.at(ch, r, c) = 0.0f;
      }
    }
  }
  return out;
}

}  // namespace mlic
