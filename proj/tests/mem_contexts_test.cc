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

#include "mlic/mem_contexts.h"

#include <gtest/gtest.h>

#include <cmath>

#include "mlic/error.h"
#include "testing.h"

namespace mlic {
namespace {

using testing::RandomTensor;

constexpr int kS = 4;

MemConfig SmallMem(LocalMode local, bool intra = true, bool inter = true) {
  MemConfig c;
  c.local_mode = local;
  c.use_intra = intra;
  c.use_inter = inter;
  c.slice_channels = kS;
  return c;
}

// Weights for slice `slice` of a 3-slice latent (M = 3S).
WeightArchive MemWeights(const MemConfig& c, uint64_t seed = 7) {
  std::vector<TensorSpec> m;
  AppendMemManifest(c, 3 * c.slice_channels, &m);
  return SeedArchive(seed, m);
}

WeightArchive MemZeros(const MemConfig& c) {
  std::vector<TensorSpec> m;
  AppendMemManifest(c, 3 * c.slice_channels, &m);
  return ZeroArchive(m);
}

bool AllZero(const Tensor& t) {
  for (float v : t.span()) {
    if (v != 0.0f) return false;
  }
  return true;
}

TEST(MemConfig, PresetsInstantiateModuleSets) {
  EXPECT_EQ(InstantiatedModules(MemConfig::Mem()),
            (std::vector<ModuleKind>{ModuleKind::kChannel, ModuleKind::kLocalStacked,
                                     ModuleKind::kIntraGlobal}));
  EXPECT_EQ(InstantiatedModules(MemConfig::MemPlus()),
            (std::vector<ModuleKind>{ModuleKind::kChannel, ModuleKind::kLocalAttention,
                                     ModuleKind::kIntraGlobal, ModuleKind::kInterGlobal}));
  const MemConfig m = MemConfig::Mem();
  EXPECT_EQ(m.stack_layers, 3);
  EXPECT_EQ(m.window, 5);
  EXPECT_EQ(m.slice_channels, 32);
}

TEST(MemConfig, Validation) {
  MemConfig c;
  c.stack_layers = 2;
  EXPECT_THROW(c.Validate(), Error);
  c = MemConfig();
  c.window = 4;
  EXPECT_THROW(c.Validate(), Error);
  c = MemConfig();
  c.use_intra = false;
  c.shared_attention_map = true;
  EXPECT_THROW(c.Validate(), Error);
  c = MemConfig();
  c.slice_channels = 0;
  EXPECT_THROW(c.Validate(), Error);
  EXPECT_EQ(ParseLocalMode("attention"), LocalMode::kAttention);
  EXPECT_THROW(ParseLocalMode("shifted"), Error);
}

TEST(MemManifest, SharedMapKeepsOnlySliceOneScores) {
  MemConfig c = SmallMem(LocalMode::kStacked, true, false);
  c.shared_attention_map = true;
  std::vector<TensorSpec> m;
  AppendMemManifest(c, 4 * kS, &m);
  const WeightArchive w = ZeroArchive(m);
  EXPECT_TRUE(w.Contains("mem.1.g_gc_intra.q.w"));
  EXPECT_TRUE(w.Contains("mem.1.g_gc_intra.k.w"));
  for (int i : {2, 3}) {
    EXPECT_FALSE(w.Contains(SlicePrefix(i) + "g_gc_intra.q.w"));
    EXPECT_TRUE(w.Contains(SlicePrefix(i) + "g_gc_intra.v.w"));
  }
  EXPECT_FALSE(w.Contains("mem.0.g_gc_intra.v.w"));
}

// --- Masks ------------------------------------------------------------------

TEST(Masks, CheckerboardTapParity) {
  EXPECT_FALSE(CheckerboardTap(0, 0));
  EXPECT_TRUE(CheckerboardTap(0, 1));
  EXPECT_TRUE(CheckerboardTap(-1, 0));
  EXPECT_FALSE(CheckerboardTap(1, 1));
  EXPECT_FALSE(CheckerboardTap(-2, 0));
  const Tensor k = MaskCheckerboardKernel(Tensor({2, 3, 5, 5}, 1.0f));
  for (int f = 0; f < 6; ++f) {
    for (int ky = 0; ky < 5; ++ky) {
      for (int kx = 0; kx < 5; ++kx) {
        EXPECT_EQ(k[f * 25 + ky * 5 + kx], ((ky + kx) % 2 == 1) ? 1.0f : 0.0f);
      }
    }
  }
  EXPECT_THROW(MaskCheckerboardKernel(Tensor({1, 1, 4, 4})), Error);
}

TEST(Masks, WindowAttentionMaskKeysAreAnchorsInWindow) {
  const AttentionMask m = WindowAttentionMask(4, 5, 3);
  for (int q = 0; q < 20; ++q) {
    int allowed = 0;
    for (int k = 0; k < 20; ++k) {
      const bool inside = std::abs(q / 5 - k / 5) <= 1 && std::abs(q % 5 - k % 5) <= 1;
      EXPECT_EQ(m.allowed(q, k), inside && IsAnchor(k / 5, k % 5));
      allowed += m.allowed(q, k);
    }
    EXPECT_GT(allowed, 0);  // every 3x3 window holds an anchor
  }
}

TEST(Masks, LocalExclusionOnThreeByThreeForbidsEverything) {
  const CheckerboardPartition p = Partition(3, 3);
  const AttentionMask m = LocalExclusionMask(p.nonanchors, p.anchors, 2);
  for (int q = 0; q < m.queries(); ++q) {
    for (int k = 0; k < m.keys(); ++k) EXPECT_FALSE(m.allowed(q, k));
  }
  const AttentionMask r1 = LocalExclusionMask(p.nonanchors, p.anchors, 0);
  for (int q = 0; q < r1.queries(); ++q) {
    for (int k = 0; k < r1.keys(); ++k) EXPECT_TRUE(r1.allowed(q, k));
  }
}

TEST(Masks, LocalExclusionChebyshev) {
  const std::vector<Position> q = {{3, 3}};
  std::vector<Position> keys;
  for (int r = 0; r < 7; ++r) {
    for (int c = 0; c < 7; ++c) keys.push_back({r, c});
  }
  const AttentionMask m = LocalExclusionMask(q, keys, 2);
  for (size_t k = 0; k < keys.size(); ++k) {
    const int d = std::max(std::abs(keys[k].row - 3), std::abs(keys[k].col - 3));
    EXPECT_EQ(m.allowed(0, static_cast<int>(k)), d > 2);
  }
}

// --- Attention cores ---------------------------------------------------------

TEST(Attention, WindowAttentionMatchesDenseMaskedForm) {
  const int h = 5, w = 6, d = 3, dv = 2;
  const Tensor q = RandomTensor({d, h, w}, 1);
  const Tensor k = RandomTensor({d, h, w}, 2);
  const Tensor v = RandomTensor({dv, h, w}, 3);
  const Tensor windowed = WindowAttention(q, k, v, 3);
  auto rows = [](const Tensor& g) {
    Tensor r({g.height() * g.width(), g.channels()});
    for (int c = 0; c < g.channels(); ++c) {
      for (size_t p = 0; p < g.plane(); ++p) r[p * g.channels() + c] = g[c * g.plane() + p];
    }
    return r;
  };
  const Tensor weights = AttentionWeights(rows(q), rows(k), WindowAttentionMask(h, w, 3));
  const Tensor dense = ApplyAttention(weights, rows(v));
  for (int c = 0; c < dv; ++c) {
    for (int p = 0; p < h * w; ++p) {
      EXPECT_NEAR(windowed[c * h * w + p], dense[p * dv + c], 1e-6f);
    }
  }
  for (int p = 0; p < h * w; ++p) {
    double sum = 0.0;
    for (int j = 0; j < h * w; ++j) sum += weights[p * h * w + j];
    EXPECT_NEAR(sum, 1.0, 1e-6);  // corners keep fewer keys but still normalize
  }
  EXPECT_THROW(WindowAttention(q, k, v, 4), Error);
}

TEST(Attention, ScaledDotProduct) {
  const Tensor q({1, 4}, std::vector<float>{1, 0, 0, 0});
  const Tensor k({2, 4}, std::vector<float>{2 * std::log(3.0f), 0, 0, 0, 0, 0, 0, 0});
  const Tensor w = AttentionWeights(q, k, AttentionMask(1, 2));
  EXPECT_NEAR(w[0], 0.75f, 1e-6f);  // scores ln3 and 0 after the 1/sqrt(4) scale
  EXPECT_NEAR(w[1], 0.25f, 1e-6f);
}

// --- Local context -----------------------------------------------------------

TEST(LocalContext, ZeroInputGivesZeroContext) {
  const Tensor zero({kS, 6, 6});
  for (LocalMode mode : {LocalMode::kVanilla, LocalMode::kStacked, LocalMode::kAttention}) {
    const MemConfig c = SmallMem(mode);
    const WeightArchive w = MemWeights(c);
    const std::string p = SlicePrefix(1);
    Tensor out;
    if (mode == LocalMode::kVanilla) out = VanillaCheckerboard(zero, w, p, 5);
    if (mode == LocalMode::kStacked) out = StackedCheckerboard(zero, w, p, 3, 5);
    if (mode == LocalMode::kAttention) out = CheckerboardAttention(zero, w, p, 5);
    EXPECT_EQ(out.shape(), (Shape{2 * kS, 6, 6}));
    EXPECT_TRUE(AllZero(out)) << LocalModeName(mode);
  }
}

// Positions where `out` differs from the zero-input response.
std::vector<Position> Support(const Tensor& out) {
  std::vector<Position> s;
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      for (int c = 0; c < out.channels(); ++c) {
        if (out.at(c, y, x) != 0.0f) {
          s.push_back({y, x});
          break;
        }
      }
    }
  }
  return s;
}

TEST(LocalContext, SingleLayerSupportIsOddTapNeighbourhood) {
  MemConfig c = SmallMem(LocalMode::kStacked);
  c.stack_layers = 1;
  const WeightArchive w = MemWeights(c);
  Tensor x({kS, 11, 11});
  x.at(1, 5, 5) = 1.0f;
  const std::vector<Position> s = Support(StackedCheckerboard(x, w, SlicePrefix(0), 1, 5));
  EXPECT_FALSE(s.empty());
  for (const Position& p : s) {
    EXPECT_FALSE(IsAnchor(p.row, p.col));
    EXPECT_LE(std::abs(p.row - 5), 2);
    EXPECT_LE(std::abs(p.col - 5), 2);
  }
  EXPECT_EQ(s.size(), 12u);  // (dy + dx) odd taps of a 5x5 window
}

TEST(LocalContext, ThreeLayerReceptiveField) {
  const MemConfig c = SmallMem(LocalMode::kStacked);
  const WeightArchive w = MemWeights(c);
  Tensor x({kS, 19, 19});
  x.at(0, 9, 9) = 1.0f;
  const std::vector<Position> s = Support(StackedCheckerboard(x, w, SlicePrefix(0), 3, 5));
  EXPECT_FALSE(s.empty());
  int reach = 0;
  for (const Position& p : s) {
    EXPECT_FALSE(IsAnchor(p.row, p.col));
    reach = std::max({reach, std::abs(p.row - 9), std::abs(p.col - 9)});
  }
  EXPECT_LE(reach, 6);  // inside 13 x 13
  EXPECT_GT(reach, 2);  // and wider than a single layer
}

TEST(LocalContext, StackedLayersTransferBetweenColours) {
  // Layer j reads the anchor grid for even j, the non-anchor grid for odd
  // j; with opposite-parity taps its output lands on the other colour.
  const MemConfig c = SmallMem(LocalMode::kStacked);
  const WeightArchive w = MemWeights(c);
  for (int j = 0; j < 3; ++j) {
    const Tensor k = MaskCheckerboardKernel(w.Get("mem.0.g_lc_stk." + std::to_string(j) + ".w"));
    const Pass source = j % 2 == 0 ? Pass::kAnchor : Pass::kNonAnchor;
    const Tensor in = KeepPass(RandomTensor({k.dim(1), 7, 7}, 20 + j), source);
    const Tensor out = Conv2d(in, k, 1, 2);
    for (const Position& p : Support(out)) {
      EXPECT_EQ(IsAnchor(p.row, p.col), source == Pass::kNonAnchor) << j;
    }
  }
}

TEST(LocalContext, IgnoresNonAnchorInputs) {
  for (LocalMode mode : {LocalMode::kVanilla, LocalMode::kStacked, LocalMode::kAttention}) {
    const MemConfig c = SmallMem(mode);
    const WeightArchive w = MemWeights(c);
    auto run = [&](const Tensor& x) {
      const std::string p = SlicePrefix(2);
      if (mode == LocalMode::kVanilla) return VanillaCheckerboard(x, w, p, 5);
      if (mode == LocalMode::kStacked) return StackedCheckerboard(x, w, p, 3, 5);
      return CheckerboardAttention(x, w, p, 5);
    };
    const Tensor x = RandomTensor({kS, 6, 7}, 30);
    const Tensor base = run(x);
    for (const Position& n : Partition(6, 7).nonanchors) {
      Tensor y = x;
      for (int ch = 0; ch < kS; ++ch) y.at(ch, n.row, n.col) += 3.0f;
      ASSERT_TRUE(BitIdentical(run(y), base)) << LocalModeName(mode);
    }
  }
}

TEST(LocalContext, Errors) {
  const MemConfig c = SmallMem(LocalMode::kStacked);
  const WeightArchive w = MemWeights(c);
  EXPECT_THROW(StackedCheckerboard(Tensor({kS, 4, 4}), w, SlicePrefix(0), 2, 5), Error);
  EXPECT_THROW(StackedCheckerboard(Tensor({kS, 4, 4}), w, SlicePrefix(0), 3, 4), Error);
  EXPECT_THROW(StackedCheckerboard(Tensor({kS, 4, 4}), w, SlicePrefix(0), 3, 3), Error);
}

// --- Channel context -----------------------------------------------------------

TEST(ChannelContext, ShapesAndZeroCase) {
  const MemConfig c = SmallMem(LocalMode::kStacked);
  const WeightArchive w = MemWeights(c);
  const std::vector<Tensor> one = {RandomTensor({kS, 5, 5}, 40)};
  EXPECT_EQ(ChannelContext(one, w, SlicePrefix(1)).shape(), (Shape{2 * kS, 5, 5}));
  const std::vector<Tensor> two = {RandomTensor({kS, 5, 5}, 41), RandomTensor({kS, 5, 5}, 42)};
  EXPECT_EQ(w.Get("mem.2.g_ch.0.w").dim(1), 2 * kS);
  EXPECT_EQ(ChannelContext(two, w, SlicePrefix(2)).shape(), (Shape{2 * kS, 5, 5}));
  EXPECT_THROW(ChannelContext(one, w, SlicePrefix(2)), Error);  // in channels 2S

  const WeightArchive z = MemZeros(c);
  EXPECT_TRUE(AllZero(ChannelContext(two, z, SlicePrefix(2))));
  try {
    ChannelContext({}, w, SlicePrefix(1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kUsage);
  }
}

// --- Global context ------------------------------------------------------------

TEST(GlobalContext, ZeroEmbeddingsGiveUniformAttention) {
  const MemConfig c = SmallMem(LocalMode::kStacked);
  const WeightArchive z = MemZeros(c);
  const CheckerboardPartition p = Partition(6, 6);
  const IntraAttentionMap map = ComputeIntraMap(RandomTensor({kS, 6, 6}, 50), p, z,
                                                SlicePrefix(1), 5);
  const AttentionMask mask = LocalExclusionMask(p.nonanchors, p.anchors, 2);
  for (int q = 0; q < mask.queries(); ++q) {
    int allowed = 0;
    for (int k = 0; k < mask.keys(); ++k) allowed += mask.allowed(q, k);
    for (int k = 0; k < mask.keys(); ++k) {
      const float want = mask.allowed(q, k) ? 1.0f / allowed : 0.0f;
      EXPECT_NEAR(map.weights[q * mask.keys() + k], want, 1e-7f);
    }
  }
}

TEST(GlobalContext, ThreeByThreeIntraRowsAreEmpty) {
  const MemConfig c = SmallMem(LocalMode::kStacked);
  const WeightArchive w = MemWeights(c);
  const IntraAttentionMap map =
      ComputeIntraMap(RandomTensor({kS, 3, 3}, 51), Partition(3, 3), w, SlicePrefix(1), 5);
  EXPECT_TRUE(AllZero(map.weights));
}

TEST(GlobalContext, OneByOneInterAttentionIsZero) {
  const MemConfig c = SmallMem(LocalMode::kAttention);
  const WeightArchive w = MemWeights(c);
  const Tensor prev = RandomTensor({kS, 1, 1}, 52);
  const Tensor anchor = RandomTensor({kS, 1, 1}, 53);
  const Tensor att = InterAttention(prev, anchor, Partition(1, 1), w, SlicePrefix(1), 5);
  EXPECT_EQ(att.shape(), (Shape{1, 2 * kS}));
  EXPECT_TRUE(AllZero(att));
  EXPECT_EQ(InterGlobal(prev, anchor, Partition(1, 1), w, SlicePrefix(1), 5).shape(),
            (Shape{2 * kS, 1, 1}));
}

TEST(GlobalContext, IntraInvariantToForbiddenKeys) {
  const MemConfig c = SmallMem(LocalMode::kStacked);
  const WeightArchive w = MemWeights(c);
  const CheckerboardPartition p = Partition(6, 6);
  const Tensor prev = RandomTensor({kS, 6, 6}, 54);
  const Tensor anchor = RandomTensor({kS, 6, 6}, 55);
  const IntraAttentionMap base = ComputeIntraMap(prev, p, w, SlicePrefix(1), 5);
  const AttentionMask mask = LocalExclusionMask(p.nonanchors, p.anchors, 2);
  const int nk = mask.keys();
  for (int k = 0; k < nk; ++k) {
    Tensor moved = prev;
    for (int ch = 0; ch < kS; ++ch) moved.at(ch, p.anchors[k].row, p.anchors[k].col) -= 2.5f;
    const IntraAttentionMap m = ComputeIntraMap(moved, p, w, SlicePrefix(1), 5);
    for (int q = 0; q < mask.queries(); ++q) {
      if (mask.allowed(q, k)) continue;
      for (int j = 0; j < nk; ++j) {
        ASSERT_EQ(m.weights[q * nk + j], base.weights[q * nk + j]) << q << " " << k;
      }
    }
  }
  EXPECT_EQ(IntraGlobal(base, anchor, p, w, SlicePrefix(1), 5).shape(),
            (Shape{2 * kS, 6, 6}));
}

TEST(GlobalContext, InterInvariantToForbiddenKeys) {
  const MemConfig c = SmallMem(LocalMode::kAttention);
  const WeightArchive w = MemWeights(c);
  const CheckerboardPartition p = Partition(6, 6);
  const Tensor prev = RandomTensor({kS, 6, 6}, 56);
  const Tensor anchor = RandomTensor({kS, 6, 6}, 57);
  const Tensor base = InterAttention(prev, anchor, p, w, SlicePrefix(1), 5);
  const int dv = base.dim(1);
  for (int r = 0; r < 6; ++r) {
    for (int col = 0; col < 6; ++col) {
      Tensor moved = prev;
      for (int ch = 0; ch < kS; ++ch) moved.at(ch, r, col) += 1.75f;
      const Tensor att = InterAttention(moved, anchor, p, w, SlicePrefix(1), 5);
      for (size_t q = 0; q < p.anchors.size(); ++q) {
        const Position& a = p.anchors[q];
        if (std::max(std::abs(a.row - r), std::abs(a.col - col)) > 2) continue;
        for (int ch = 0; ch < dv; ++ch) {
          ASSERT_EQ(att[q * dv + ch], base[q * dv + ch]) << r << "," << col;
        }
      }
    }
  }
}

TEST(GlobalContext, ShapeErrors) {
  const MemConfig c = SmallMem(LocalMode::kAttention);
  const WeightArchive w = MemWeights(c);
  const CheckerboardPartition p = Partition(4, 4);
  EXPECT_THROW(InterGlobal(Tensor({kS, 4, 5}), Tensor({kS, 4, 4}), p, w, SlicePrefix(1), 5),
               Error);
  EXPECT_THROW(ComputeIntraMap(Tensor({kS, 3, 4}), p, w, SlicePrefix(1), 5), Error);
  const IntraAttentionMap map = ComputeIntraMap(Tensor({kS, 4, 4}), p, w, SlicePrefix(1), 5);
  EXPECT_THROW(IntraGlobal(map, Tensor({kS, 5, 5}), Partition(5, 5), w, SlicePrefix(1), 5),
               Error);
}

// --- LRP and parameter fusion ------------------------------------------------------

TEST(Lrp, ZeroWeightsAndBound) {
  const MemConfig c = SmallMem(LocalMode::kStacked);
  const Tensor phi_h = RandomTensor({6 * kS, 4, 4}, 60);
  const std::vector<Tensor> slices = {RandomTensor({kS, 4, 4}, 61)};
  const Tensor r0 = LatentResidual(phi_h, slices, MemZeros(c), SlicePrefix(0));
  EXPECT_TRUE(BitIdentical(RefineSlice(slices[0], r0), slices[0]));
  const Tensor r = LatentResidual(phi_h, slices, MemWeights(c), SlicePrefix(0));
  EXPECT_EQ(r.shape(), (Shape{kS, 4, 4}));
  const Tensor big = RandomTensor({kS, 4, 4}, 62, -1e4f, 1e4f);
  const Tensor refined = RefineSlice(slices[0], big);
  for (size_t i = 0; i < big.size(); ++i) {
    EXPECT_LE(std::abs(refined[i] - slices[0][i]), 0.5f + 1e-6f);
  }
  EXPECT_THROW(RefineSlice(slices[0], Tensor({kS, 4, 5})), Error);
}

TEST(EntropyParams, ZeroWeightsGiveSoftplusZero) {
  const MemConfig c = SmallMem(LocalMode::kStacked);
  const ContextBundle b = ContextBundle::HyperOnly(Tensor({6 * kS, 3, 3}), kS);
  const GaussianParams g = EntropyParams(b, MemZeros(c), SlicePrefix(0));
  EXPECT_EQ(g.mu.shape(), (Shape{kS, 3, 3}));
  for (float v : g.mu.span()) EXPECT_EQ(v, 0.0f);
  for (float v : g.sigma.span()) EXPECT_NEAR(v, 0.6931472f, 1e-6f);
  EXPECT_NEAR(Softplus(0.0f), std::log(2.0f), 1e-7f);
  EXPECT_NEAR(Softplus(100.0f), 100.0f, 1e-4f);
  EXPECT_GT(Softplus(-30.0f), 0.0f);
}

TEST(EntropyParams, SigmaFloor) {
  const MemConfig c = SmallMem(LocalMode::kStacked);
  const WeightArchive w = MemWeights(c);
  ContextBundle b = ContextBundle::HyperOnly(RandomTensor({6 * kS, 5, 5}, 63, -50, 50), kS);
  b.phi_lc = RandomTensor({2 * kS, 5, 5}, 64, -50, 50);
  const GaussianParams g = EntropyParams(b, w, SlicePrefix(1));
  for (float v : g.sigma.span()) EXPECT_GE(v, kSigmaMin);
}

TEST(ContextBundle, HyperOnlyHasZeroFallbacks) {
  const ContextBundle b = ContextBundle::HyperOnly(Tensor({12, 2, 3}, 1.0f), kS);
  EXPECT_FALSE(b.has_ch || b.has_lc || b.has_intra || b.has_inter);
  for (const Tensor* t : {&b.phi_ch, &b.phi_lc, &b.phi_gc_intra, &b.phi_gc_inter}) {
    EXPECT_EQ(t->shape(), (Shape{2 * kS, 2, 3}));
    EXPECT_TRUE(AllZero(*t));
  }
}

}  // namespace
}  // namespace mlic
