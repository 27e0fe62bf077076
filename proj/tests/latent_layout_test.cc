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

#include <gtest/gtest.h>

#include <set>

#include "mlic/error.h"
#include "testing.h"

namespace mlic {
namespace {

TEST(PlanSlices, PresetCounts) {
  EXPECT_EQ(PlanSlices(192, 32).num_slices, 6);
  EXPECT_EQ(PlanSlices(320, 32).num_slices, 10);
  const SlicePlan one = PlanSlices(32, 32);
  EXPECT_EQ(one.num_slices, 1);
  EXPECT_EQ(one.ranges[0], (SliceRange{0, 32}));
}

TEST(PlanSlices, ContiguousAndEven) {
  const SlicePlan p = PlanSlices(96, 16);
  ASSERT_EQ(p.ranges.size(), 6u);
  for (int i = 0; i < 6; ++i) {
    EXPECT_EQ(p.ranges[i].begin, 16 * i);
    EXPECT_EQ(p.ranges[i].size(), 16);
  }
}

TEST(PlanSlices, RejectsNonDivisor) {
  EXPECT_THROW(PlanSlices(192, 40), Error);
  EXPECT_THROW(PlanSlices(192, 0), Error);
  try {
    PlanSlices(100, 32);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kUsage);
  }
}

TEST(Partition, SmallGrids) {
  const CheckerboardPartition p2 = Partition(2, 2);
  EXPECT_EQ(p2.anchors, (std::vector<Position>{{0, 0}, {1, 1}}));
  EXPECT_EQ(p2.nonanchors, (std::vector<Position>{{0, 1}, {1, 0}}));
  const CheckerboardPartition p1 = Partition(1, 1);
  EXPECT_EQ(p1.anchors, (std::vector<Position>{{0, 0}}));
  EXPECT_TRUE(p1.nonanchors.empty());
  const CheckerboardPartition p3 = Partition(3, 3);
  EXPECT_EQ(p3.anchors.size(), 5u);
  EXPECT_EQ(p3.nonanchors.size(), 4u);
  EXPECT_THROW(Partition(0, 3), Error);
}

TEST(Partition, CoversGridDisjointly) {
  for (int h = 1; h <= 7; ++h) {
    for (int w = 1; w <= 7; ++w) {
      const CheckerboardPartition p = Partition(h, w);
      std::set<std::pair<int, int>> seen;
      for (const Position& a : p.anchors) {
        EXPECT_TRUE(IsAnchor(a.row, a.col));
        seen.insert({a.row, a.col});
      }
      for (const Position& n : p.nonanchors) {
        EXPECT_FALSE(IsAnchor(n.row, n.col));
        seen.insert({n.row, n.col});
      }
      EXPECT_EQ(seen.size(), static_cast<size_t>(h * w));
      EXPECT_EQ(p.anchors.size(), static_cast<size_t>((h * w + 1) / 2));
    }
  }
}

TEST(CodingOrder, HandExamples) {
  const CodingOrder a = MakeCodingOrder(PlanSlices(2, 2), Partition(1, 1));
  EXPECT_EQ(a, (CodingOrder{{0, Pass::kAnchor, 0, 0, 0}, {0, Pass::kAnchor, 1, 0, 0}}));
  const CodingOrder b = MakeCodingOrder(PlanSlices(2, 1), Partition(2, 1));
  EXPECT_EQ(b, (CodingOrder{{0, Pass::kAnchor, 0, 0, 0},
                            {0, Pass::kNonAnchor, 0, 1, 0},
                            {1, Pass::kAnchor, 0, 0, 0},
                            {1, Pass::kNonAnchor, 0, 1, 0}}));
}

TEST(CodingOrder, PermutationOfAllSymbols) {
  Xoshiro256 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int s = 1 + static_cast<int>(rng.Next() % 4);
    const int l = 1 + static_cast<int>(rng.Next() % 4);
    const int h = 1 + static_cast<int>(rng.Next() % 6);
    const int w = 1 + static_cast<int>(rng.Next() % 6);
    const CodingOrder order = MakeCodingOrder(PlanSlices(s * l, s), Partition(h, w));
    ASSERT_EQ(order.size(), static_cast<size_t>(s * l * h * w));
    std::set<std::tuple<int, int, int>> seen;
    for (size_t i = 0; i < order.size(); ++i) {
      const SymbolRef& r = order[i];
      EXPECT_EQ(IsAnchor(r.row, r.col), r.pass == Pass::kAnchor);
      seen.insert({r.slice * s + r.channel, r.row, r.col});
      if (i == 0) continue;
      const SymbolRef& p = order[i - 1];
      // slice-major, anchor pass first, channel-major, raster.
      const auto key = [](const SymbolRef& x) {
        return std::make_tuple(x.slice, static_cast<int>(x.pass), x.channel, x.row, x.col);
      };
      EXPECT_LT(key(p), key(r));
    }
    EXPECT_EQ(seen.size(), order.size());
  }
}

TEST(CodingOrder, IndependentDerivationsSerializeEqually) {
  // Encoder side from the config, decoder side from header integers.
  const SlicePlan enc = PlanSlices(320, 32);
  const SlicePlan dec = PlanSlices(10 * 32, 320 / 10);
  EXPECT_EQ(SerializeOrder(MakeCodingOrder(enc, Partition(8, 12))),
            SerializeOrder(MakeCodingOrder(dec, Partition(8, 12))));
  EXPECT_EQ(SerializeOrder(MakeCodingOrder(PlanSlices(2, 1), Partition(1, 1))).size(), 20u);
}

TEST(GatherScatter, RoundTripPerPass) {
  const Tensor x = testing::RandomTensor({3, 5, 6}, 12);
  const CheckerboardPartition p = Partition(5, 6);
  for (Pass pass : {Pass::kAnchor, Pass::kNonAnchor}) {
    const Tensor g = Gather(x, p.positions(pass));
    EXPECT_EQ(g.shape(), (Shape{3, static_cast<int>(p.positions(pass).size())}));
    EXPECT_TRUE(BitIdentical(Scatter(g, p.positions(pass), 5, 6), KeepPass(x, pass)));
  }
  Tensor sum = KeepPass(x, Pass::kAnchor);
  AddInPlace(sum, KeepPass(x, Pass::kNonAnchor));
  EXPECT_TRUE(BitIdentical(sum, x));
}

}  // namespace
}  // namespace mlic
