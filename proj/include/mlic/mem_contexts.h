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

// Context networks of the multi-reference entropy model.
//
// Every context feature is 2S channels wide. The parameter network sees
// concat(hyper, channel, local, intra-global, inter-global), i.e.
// 2M + 8S channels, with unavailable parts zero. Weights are per slice and
// live under "mem.<slice>.<module>.".
//
// Local and global context modules carry no biases (except the query
// projections), so an all-zero input maps to an all-zero context.

#ifndef MLIC_MEM_CONTEXTS_H_
#define MLIC_MEM_CONTEXTS_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mlic/entropy.h"
#include "mlic/latent_layout.h"
#include "mlic/tensor.h"
#include "mlic/weight_archive.h"

namespace mlic {

enum class LocalMode : uint8_t {
  kVanilla = 0,    // one masked K x K conv
  kStacked = 1,    // J masked convs
  kAttention = 2,  // windowed checkerboard attention
  kNone = 3,       // no local context
};

const char* LocalModeName(LocalMode mode);
// "vanilla", "stacked", "attention", "none"; throws kUsage otherwise.
LocalMode ParseLocalMode(const std::string& name);

enum class ModuleKind {
  kChannel,
  kLocalVanilla,
  kLocalStacked,
  kLocalAttention,
  kIntraGlobal,
  kInterGlobal,
};

const char* ModuleName(ModuleKind kind);

struct MemConfig {
  LocalMode local_mode = LocalMode::kStacked;
  bool use_intra = true;
  bool use_inter = false;
  bool shared_attention_map = false;
  int stack_layers = 3;    // J
  int window = 5;          // K
  int slice_channels = 32; // S

  static MemConfig Mem();
  static MemConfig MemPlus();

  // Throws kUsage for even J or K, non-positive S, or a shared map without
  // the intra module.
  void Validate() const;
  int context_width() const { return 2 * slice_channels; }
  // Radius of the local window excluded from global attention.
  int local_radius() const { return (window - 1) / 2; }

  friend bool operator==(const MemConfig&, const MemConfig&) = default;
};

// Context modules the config builds, in a fixed order.
std::vector<ModuleKind> InstantiatedModules(const MemConfig& config);

std::string SlicePrefix(int slice);

void AppendMemManifest(const MemConfig& config, int m_channels,
                       std::vector<TensorSpec>* manifest);

struct ContextBundle {
  Tensor phi_h;         // (2M, h, w)
  Tensor phi_ch;        // (2S, h, w)
  Tensor phi_lc;        // (2S, h, w)
  Tensor phi_gc_intra;  // (2S, h, w)
  Tensor phi_gc_inter;  // (2S, h, w)
  bool has_ch = false;
  bool has_lc = false;
  bool has_intra = false;
  bool has_inter = false;

  // Hyperprior only; every other field zero and unavailable.
  static ContextBundle HyperOnly(Tensor phi_h, int slice_channels);
};

// --- Masks -----------------------------------------------------------------

// Kernel taps a checkerboard-masked conv keeps: (dy + dx) odd, which always
// excludes the center.
bool CheckerboardTap(int dy, int dx);
// Copy of a (out, in, K, K) kernel with every other tap zeroed.
Tensor MaskCheckerboardKernel(const Tensor& kernel);

// Windowed checkerboard attention over an h x w grid, raster-indexed:
// query p may attend key q iff q is an anchor inside p's K x K window.
AttentionMask WindowAttentionMask(int height, int width, int window);
// Global attention: key allowed iff its Chebyshev distance to the query
// exceeds `radius`.
AttentionMask LocalExclusionMask(std::span<const Position> queries,
                                 std::span<const Position> keys, int radius);

// --- Attention cores -------------------------------------------------------

// softmax(q k^T / sqrt(d)) over allowed keys. q (nq, d), k (nk, d).
Tensor AttentionWeights(const Tensor& q, const Tensor& k, const AttentionMask& mask);
// weights (nq, nk) x values (nk, dv) -> (nq, dv), summed in key order.
Tensor ApplyAttention(const Tensor& weights, const Tensor& values);

// Windowed attention of (d, h, w) queries over anchor keys/values inside a
// K x K window; returns (dv, h, w). Equal to the dense form under
// WindowAttentionMask.
Tensor WindowAttention(const Tensor& q, const Tensor& k, const Tensor& v, int window);

// --- Context modules -------------------------------------------------------

// slices: the decoded slices 0..i-1, each (S, h, w). Throws kUsage if empty.
Tensor ChannelContext(std::span<const Tensor> slices, const WeightArchive& w,
                      const std::string& prefix);

// anchor: (S, h, w); non-anchor positions are ignored.
Tensor VanillaCheckerboard(const Tensor& anchor, const WeightArchive& w,
                           const std::string& prefix, int window);
Tensor StackedCheckerboard(const Tensor& anchor, const WeightArchive& w,
                           const std::string& prefix, int layers, int window);
Tensor CheckerboardAttention(const Tensor& anchor, const WeightArchive& w,
                             const std::string& prefix, int window);

// Attention of slice i-1's non-anchor positions over its anchor positions.
struct IntraAttentionMap {
  std::vector<Position> queries;  // non-anchor
  std::vector<Position> keys;     // anchor
  Tensor weights;                 // (nq, nk)
};

IntraAttentionMap ComputeIntraMap(const Tensor& prev_slice,
                                  const CheckerboardPartition& partition,
                                  const WeightArchive& w, const std::string& prefix,
                                  int window);
// Attention stage of IntraGlobal: (n_nonanchor, 2S) rows.
Tensor IntraAttention(const IntraAttentionMap& map, const Tensor& anchor_i,
                      const CheckerboardPartition& partition, const WeightArchive& w,
                      const std::string& prefix);
// Values come from slice i's anchors; `map` from ComputeIntraMap on slice
// i-1, or the shared map.
Tensor IntraGlobal(const IntraAttentionMap& map, const Tensor& anchor_i,
                   const CheckerboardPartition& partition, const WeightArchive& w,
                   const std::string& prefix, int window);
// Attention stage of InterGlobal: (n_anchor, 2S) rows, one per anchor of
// slice i, over all positions of slice i-1 outside the local window.
Tensor InterAttention(const Tensor& prev_slice, const Tensor& anchor_i,
                      const CheckerboardPartition& partition, const WeightArchive& w,
                      const std::string& prefix, int window);
Tensor InterGlobal(const Tensor& prev_slice, const Tensor& anchor_i,
                   const CheckerboardPartition& partition, const WeightArchive& w,
                   const std::string& prefix, int window);

// Residual prediction from concat(phi_h, slices...) where `slices` are the
// refined slices < i followed by the decoded slice i.
Tensor LatentResidual(const Tensor& phi_h, std::span<const Tensor> slices,
                      const WeightArchive& w, const std::string& prefix);
// slice + 0.5 tanh(residual).
Tensor RefineSlice(const Tensor& slice, const Tensor& residual);

float Softplus(float x);
// Fusion -> (mu, sigma), each (S, h, w); sigma = max(softplus(raw), 0.11).
GaussianParams EntropyParams(const ContextBundle& bundle, const WeightArchive& w,
                             const std::string& prefix);

}  // namespace mlic

#endif  // MLIC_MEM_CONTEXTS_H_
