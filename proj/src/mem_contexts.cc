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

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "mlic/error.h"
#include "mlic/parallel.h"

namespace mlic {
namespace {

constexpr int kChannelKernel = 3;
constexpr int kLrpKernel = 3;

void AddConv(std::vector<TensorSpec>* m, const std::string& name, int out,
             int in, int k, bool bias, float scale = 1.0f, int fan_in = 0) {
  m->push_back({name + ".w", {out, in, k, k}, Init::kHeUniform,
                fan_in > 0 ? fan_in : in * k * k, scale});
  if (bias) m->push_back({name + ".b", {out}, Init::kSmallBias, 1, 1.0f});
}

void AddLinear(std::vector<TensorSpec>* m, const std::string& name, int out,
               int in, bool bias, float scale = 1.0f) {
  m->push_back({name + ".w", {out, in}, Init::kHeUniform, in, scale});
  if (bias) m->push_back({name + ".b", {out}, Init::kSmallBias, 1, 1.0f});
}

void AddFfn(std::vector<TensorSpec>* m, const std::string& prefix, int width) {
  AddLinear(m, prefix + "ffn.0", 2 * width, width, false);
  AddLinear(m, prefix + "ffn.1", width, 2 * width, false, 0.5f);
}

// A checkerboard kernel keeps about half its taps.
int MaskedFanIn(int in, int k) { return std::max(1, in * (k * k / 2)); }

const Tensor kNoBias;

Tensor ConvW(const Tensor& x, const WeightArchive& w, const std::string& name,
             int padding) {
  const std::string b = name + ".b";
  if (w.Contains(b)) return Conv2d(x, w.Get(name + ".w"), w.Get(b), 1, padding);
  return Conv2d(x, w.Get(name + ".w"), 1, padding);
}

Tensor LinearW(const Tensor& x, const WeightArchive& w, const std::string& name) {
  const std::string b = name + ".b";
  return Linear(x, w.Get(name + ".w"), w.Contains(b) ? w.Get(b) : kNoBias);
}

// t + ffn(t), per position.
Tensor FfnResidual(Tensor t, const WeightArchive& w, const std::string& prefix) {
  Tensor h = LinearW(t, w, prefix + "ffn.0");
  GeluInPlace(h);
  AddInPlace(t, LinearW(h, w, prefix + "ffn.1"));
  return t;
}

// (n, C) rows of a (C, h, w) grid at `positions`.
Tensor RowsAt(const Tensor& grid, std::span<const Position> positions) {
  const int c = grid.channels();
  const int n = static_cast<int>(positions.size());
  Tensor out({n, c});
  for (int j = 0; j < n; ++j) {
    for (int ch = 0; ch < c; ++ch) {
      out[static_cast<size_t>(j) * c + ch] =
          grid.at(ch, positions[j].row, positions[j].col);
    }
  }
  return out;
}

// (n, C) rows -> (C, h, w), zero elsewhere.
Tensor GridFromRows(const Tensor& rows, std::span<const Position> positions,
                    int height, int width) {
  const int n = rows.dim(0);
  const int c = rows.dim(1);
  Tensor out({c, height, width});
  for (int j = 0; j < n; ++j) {
    for (int ch = 0; ch < c; ++ch) {
      out.at(ch, positions[j].row, positions[j].col) =
          rows[static_cast<size_t>(j) * c + ch];
    }
  }
  return out;
}

std::vector<Position> AllPositions(int height, int width) {
  std::vector<Position> p;
  p.reserve(static_cast<size_t>(height) * width);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) p.push_back({r, c});
  }
  return p;
}

void CheckWindow(int window) {
  if (window < 1 || window % 2 == 0) {
    Fail(ErrorKind::kUsage, "window size must be odd, got " + std::to_string(window));
  }
}

void CheckSliceGrid(const Tensor& t, const CheckerboardPartition& p,
                    const char* what) {
  if (t.rank() != 3 || t.height() != p.height || t.width() != p.width) {
    Fail(ErrorKind::kShape, std::string(what) + ": slice " +
                                ShapeString(t.shape()) + " does not match the " +
                                std::to_string(p.height) + "x" +
                                std::to_string(p.width) + " partition");
  }
}

}  // namespace

const char* LocalModeName(LocalMode mode) {
  switch (mode) {
    case LocalMode::kVanilla: return "vanilla";
    case LocalMode::kStacked: return "stacked";
    case LocalMode::kAttention: return "attention";
    case LocalMode::kNone: return "none";
  }
  return "?";
}

LocalMode ParseLocalMode(const std::string& name) {
  for (LocalMode m : {LocalMode::kVanilla, LocalMode::kStacked,
                      LocalMode::kAttention, LocalMode::kNone}) {
    if (name == LocalModeName(m)) return m;
  }
  Fail(ErrorKind::kUsage, "unknown local context mode '" + name +
                              "' (expected vanilla, stacked, attention or none)");
}

const char* ModuleName(ModuleKind kind) {
  switch (kind) {
    case ModuleKind::kChannel: return "g_ch";
    case ModuleKind::kLocalVanilla: return "g_lc_ckbd";
    case ModuleKind::kLocalStacked: return "g_lc_stk";
    case ModuleKind::kLocalAttention: return "g_lc_attn";
    case ModuleKind::kIntraGlobal: return "g_gc_intra";
    case ModuleKind::kInterGlobal: return "g_gc_inter";
  }
  return "?";
}

MemConfig MemConfig::Mem() { return MemConfig{}; }

MemConfig MemConfig::MemPlus() {
  MemConfig c;
  c.local_mode = LocalMode::kAttention;
  c.use_intra = true;
  c.use_inter = true;
  return c;
}

void MemConfig::Validate() const {
  Check(slice_channels > 0, ErrorKind::kUsage, "slice width must be positive");
  CheckWindow(window);
  if (stack_layers < 1 || stack_layers % 2 == 0) {
    Fail(ErrorKind::kUsage, "stacked checkerboard depth must be odd, got " +
                                std::to_string(stack_layers));
  }
  Check(!shared_attention_map || use_intra, ErrorKind::kUsage,
        "a shared attention map needs the intra-slice global context");
}

std::vector<ModuleKind> InstantiatedModules(const MemConfig& config) {
  std::vector<ModuleKind> out{ModuleKind::kChannel};
  switch (config.local_mode) {
    case LocalMode::kVanilla: out.push_back(ModuleKind::kLocalVanilla); break;
    case LocalMode::kStacked: out.push_back(ModuleKind::kLocalStacked); break;
    case LocalMode::kAttention: out.push_back(ModuleKind::kLocalAttention); break;
    case LocalMode::kNone: break;
  }
  if (config.use_intra) out.push_back(ModuleKind::kIntraGlobal);
  if (config.use_inter) out.push_back(ModuleKind::kInterGlobal);
  return out;
}

std::string SlicePrefix(int slice) { return "mem." + std::to_string(slice) + "."; }

void AppendMemManifest(const MemConfig& config, int m_channels,
                       std::vector<TensorSpec>* m) {
  config.Validate();
  const SlicePlan plan = PlanSlices(m_channels, config.slice_channels);
  const int s = config.slice_channels;
  const int cw = config.context_width();
  const int k = config.window;
  const int fused = 2 * m_channels + 4 * cw;
  for (int i = 0; i < plan.num_slices; ++i) {
    const std::string p = SlicePrefix(i);
    AddLinear(m, p + "g_ep.0", 2 * cw, fused, true);
    AddLinear(m, p + "g_ep.1", 2 * cw, 2 * cw, true);
    AddLinear(m, p + "g_ep.2", 2 * s, 2 * cw, true, 0.5f);

    AddConv(m, p + "lrp.0", cw, 2 * m_channels + (i + 1) * s, kLrpKernel, true);
    AddConv(m, p + "lrp.1", cw, cw, kLrpKernel, true);
    AddConv(m, p + "lrp.2", s, cw, kLrpKernel, true, 0.5f);

    if (i >= 1) {
      AddConv(m, p + "g_ch.0", 2 * cw, i * s, kChannelKernel, true);
      AddConv(m, p + "g_ch.1", cw, 2 * cw, kChannelKernel, true);
      AddConv(m, p + "g_ch.2", cw, cw, kChannelKernel, true);
    }

    switch (config.local_mode) {
      case LocalMode::kVanilla:
        AddConv(m, p + "g_lc_ckbd", cw, s, k, false, 1.0f, MaskedFanIn(s, k));
        break;
      case LocalMode::kStacked:
        for (int j = 0; j < config.stack_layers; ++j) {
          const int in = j == 0 ? s : cw;
          AddConv(m, p + "g_lc_stk." + std::to_string(j), cw, in, k, false,
                  1.0f, MaskedFanIn(in, k));
        }
        break;
      case LocalMode::kAttention:
        AddLinear(m, p + "g_lc_attn.q", s, s, true);
        AddLinear(m, p + "g_lc_attn.k", s, s, false);
        AddLinear(m, p + "g_lc_attn.v", s, s, false);
        AddConv(m, p + "g_lc_attn.fuse", cw, s, k, false);
        AddFfn(m, p + "g_lc_attn.", cw);
        break;
      case LocalMode::kNone:
        break;
    }

    if (i >= 1 && config.use_intra) {
      const std::string g = p + "g_gc_intra.";
      // With a shared map only slice 1 computes attention scores.
      if (!config.shared_attention_map || i == 1) {
        AddLinear(m, g + "q", s, s, true);
        AddLinear(m, g + "k", s, s, false);
      }
      AddLinear(m, g + "v", cw, s, false);
      AddConv(m, g + "fuse", cw, cw, k, false);
      AddFfn(m, g, cw);
    }
    if (i >= 1 && config.use_inter) {
      const std::string g = p + "g_gc_inter.";
      AddLinear(m, g + "q", s, s, true);
      AddLinear(m, g + "k", s, s, false);
      AddLinear(m, g + "v", cw, s, false);
      AddConv(m, g + "fuse", cw, cw, k, false);
      AddFfn(m, g, cw);
    }
  }
}

ContextBundle ContextBundle::HyperOnly(Tensor phi_h, int slice_channels) {
  Check(phi_h.rank() == 3, ErrorKind::kShape, "hyperprior features must be (2M, h, w)");
  ContextBundle b;
  const Shape ctx{2 * slice_channels, phi_h.height(), phi_h.width()};
  b.phi_ch = Tensor(ctx);
  b.phi_lc = Tensor(ctx);
  b.phi_gc_intra = Tensor(ctx);
  b.phi_gc_inter = Tensor(ctx);
  b.phi_h = std::move(phi_h);
  return b;
}

bool CheckerboardTap(int dy, int dx) { return ((dy + dx) & 1) != 0; }

Tensor MaskCheckerboardKernel(const Tensor& kernel) {
  Check(kernel.rank() == 4 && kernel.dim(2) == kernel.dim(3) && kernel.dim(2) % 2 == 1,
        ErrorKind::kShape, "checkerboard kernel must be (out, in, K, K) with odd K");
  Tensor out = kernel;
  const int k = kernel.dim(2);
  const int r = k / 2;
  const size_t taps = static_cast<size_t>(k) * k;
  const size_t filters = static_cast<size_t>(kernel.dim(0)) * kernel.dim(1);
  for (size_t f = 0; f < filters; ++f) {
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx) {
        if (!CheckerboardTap(ky - r, kx - r)) out[f * taps + ky * k + kx] = 0.0f;
      }
    }
  }
  return out;
}

AttentionMask WindowAttentionMask(int height, int width, int window) {
  CheckWindow(window);
  const int r = window / 2;
  const int n = height * width;
  AttentionMask mask(n, n, false);
  for (int qy = 0; qy < height; ++qy) {
    for (int qx = 0; qx < width; ++qx) {
      for (int ky = 0; ky < height; ++ky) {
        for (int kx = 0; kx < width; ++kx) {
          const bool inside = std::abs(ky - qy) <= r && std::abs(kx - qx) <= r;
          mask.set(qy * width + qx, ky * width + kx, inside && IsAnchor(ky, kx));
        }
      }
    }
  }
  return mask;
}

AttentionMask LocalExclusionMask(std::span<const Position> queries,
                                 std::span<const Position> keys, int radius) {
  AttentionMask mask(static_cast<int>(queries.size()), static_cast<int>(keys.size()));
  for (size_t q = 0; q < queries.size(); ++q) {
    for (size_t k = 0; k < keys.size(); ++k) {
      const int d = std::max(std::abs(queries[q].row - keys[k].row),
                             std::abs(queries[q].col - keys[k].col));
      mask.set(static_cast<int>(q), static_cast<int>(k), d > radius);
    }
  }
  return mask;
}

Tensor AttentionWeights(const Tensor& q, const Tensor& k, const AttentionMask& mask) {
  Check(q.rank() == 2 && k.rank() == 2 && q.dim(1) == k.dim(1), ErrorKind::kShape,
        "AttentionWeights: q " + ShapeString(q.shape()) + " vs k " +
            ShapeString(k.shape()));
  const int nq = q.dim(0);
  const int nk = k.dim(0);
  const int d = q.dim(1);
  Check(mask.queries() == nq && mask.keys() == nk, ErrorKind::kShape,
        "AttentionWeights: mask does not match q/k");
  const float scale = 1.0f / std::sqrt(static_cast<float>(d));
  Tensor scores({nq, nk});
  ParallelFor(nq, [&](size_t i) {
    const float* qi = q.data() + i * d;
    for (int j = 0; j < nk; ++j) {
      const float* kj = k.data() + static_cast<size_t>(j) * d;
      float acc = 0.0f;
      for (int c = 0; c < d; ++c) acc += qi[c] * kj[c];
      scores[i * nk + j] = acc * scale;
    }
  });
  return MaskedSoftmax(scores, mask);
}

Tensor ApplyAttention(const Tensor& weights, const Tensor& values) {
  Check(weights.rank() == 2 && values.rank() == 2 && weights.dim(1) == values.dim(0),
        ErrorKind::kShape,
        "ApplyAttention: weights " + ShapeString(weights.shape()) + " vs values " +
            ShapeString(values.shape()));
  const int nq = weights.dim(0);
  const int nk = weights.dim(1);
  const int dv = values.dim(1);
  Tensor out({nq, dv});
  ParallelFor(nq, [&](size_t i) {
    const float* wi = weights.data() + i * nk;
    for (int c = 0; c < dv; ++c) {
      float acc = 0.0f;
      for (int j = 0; j < nk; ++j) acc += wi[j] * values[static_cast<size_t>(j) * dv + c];
      out[i * dv + c] = acc;
    }
  });
  return out;
}

Tensor WindowAttention(const Tensor& q, const Tensor& k, const Tensor& v, int window) {
  CheckWindow(window);
  if (q.rank() != 3 || k.shape() != q.shape() || v.rank() != 3 ||
      v.height() != q.height() || v.width() != q.width()) {
    Fail(ErrorKind::kShape, "WindowAttention: q " + ShapeString(q.shape()) + ", k " +
                                ShapeString(k.shape()) + ", v " +
                                ShapeString(v.shape()));
  }
  const int d = q.channels();
  const int dv = v.channels();
  const int h = q.height();
  const int w = q.width();
  const int r = window / 2;
  const size_t plane = q.plane();
  const float scale = 1.0f / std::sqrt(static_cast<float>(d));
  // Position-major copies keep each dot product contiguous.
  auto rows = [plane](const Tensor& t) {
    const int c = t.channels();
    std::vector<float> r(t.size());
    for (int ch = 0; ch < c; ++ch) {
      const float* src = t.channel(ch);
      for (size_t p = 0; p < plane; ++p) r[p * c + ch] = src[p];
    }
    return r;
  };
  const std::vector<float> qr = rows(q);
  const std::vector<float> kr = rows(k);
  const std::vector<float> vr = rows(v);
  std::vector<float> acc_rows(plane * dv);
  ParallelFor(h, [&](size_t row) {
    const int y = static_cast<int>(row);
    std::vector<size_t> keys;
    std::vector<float> scores;
    std::vector<float> weights;
    std::vector<uint8_t> allowed;
    for (int x = 0; x < w; ++x) {
      keys.clear();
      for (int ky = std::max(0, y - r); ky <= std::min(h - 1, y + r); ++ky) {
        for (int kx = std::max(0, x - r); kx <= std::min(w - 1, x + r); ++kx) {
          if (IsAnchor(ky, kx)) keys.push_back(static_cast<size_t>(ky) * w + kx);
        }
      }
      const size_t p = static_cast<size_t>(y) * w + x;
      scores.resize(keys.size());
      weights.resize(keys.size());
      allowed.assign(keys.size(), 1);
      const float* qp = &qr[p * d];
      for (size_t j = 0; j < keys.size(); ++j) {
        const float* kp = &kr[keys[j] * d];
        float acc = 0.0f;
        for (int c = 0; c < d; ++c) acc += qp[c] * kp[c];
        scores[j] = acc * scale;
      }
      MaskedSoftmaxRow(scores, allowed, weights);
      float* op = &acc_rows[p * dv];
      for (int c = 0; c < dv; ++c) {
        float acc = 0.0f;
        for (size_t j = 0; j < keys.size(); ++j) acc += weights[j] * vr[keys[j] * dv + c];
        op[c] = acc;
      }
    }
  });
  Tensor out({dv, h, w});
  for (int c = 0; c < dv; ++c) {
    float* dst = out.channel(c);
    for (size_t p = 0; p < plane; ++p) dst[p] = acc_rows[p * dv + c];
  }
  return out;
}

Tensor ChannelContext(std::span<const Tensor> slices, const WeightArchive& w,
                      const std::string& prefix) {
  Check(!slices.empty(), ErrorKind::kUsage,
        "channel context needs at least one decoded slice");
  std::vector<const Tensor*> parts;
  for (const Tensor& s : slices) parts.push_back(&s);
  Tensor x = ConcatChannels(parts);
  x = ConvW(x, w, prefix + "g_ch.0", kChannelKernel / 2);
  GeluInPlace(x);
  x = ConvW(x, w, prefix + "g_ch.1", kChannelKernel / 2);
  GeluInPlace(x);
  return ConvW(x, w, prefix + "g_ch.2", kChannelKernel / 2);
}

Tensor VanillaCheckerboard(const Tensor& anchor, const WeightArchive& w,
                           const std::string& prefix, int window) {
  CheckWindow(window);
  const Tensor kernel = MaskCheckerboardKernel(w.Get(prefix + "g_lc_ckbd.w"));
  Check(kernel.dim(2) == window, ErrorKind::kManifest,
        "g_lc_ckbd kernel size does not match the window");
  Tensor out = Conv2d(KeepPass(anchor, Pass::kAnchor), kernel, 1, window / 2);
  return KeepPass(out, Pass::kNonAnchor);
}

Tensor StackedCheckerboard(const Tensor& anchor, const WeightArchive& w,
                           const std::string& prefix, int layers, int window) {
  CheckWindow(window);
  if (layers < 1 || layers % 2 == 0) {
    Fail(ErrorKind::kUsage, "stacked checkerboard depth must be odd, got " +
                                std::to_string(layers));
  }
  // Every layer moves information to the opposite colour: anchors feed
  // non-anchors, which feed anchors, and so on. An odd depth ends on the
  // non-anchor positions.
  Tensor x = anchor;
  for (int j = 0; j < layers; ++j) {
    const Pass source = j % 2 == 0 ? Pass::kAnchor : Pass::kNonAnchor;
    const Tensor kernel =
        MaskCheckerboardKernel(w.Get(prefix + "g_lc_stk." + std::to_string(j) + ".w"));
    Check(kernel.dim(2) == window, ErrorKind::kManifest,
          "g_lc_stk kernel size does not match the window");
    x = Conv2d(KeepPass(x, source), kernel, 1, window / 2);
    if (j + 1 < layers) GeluInPlace(x);
  }
  return KeepPass(x, Pass::kNonAnchor);
}

Tensor CheckerboardAttention(const Tensor& anchor, const WeightArchive& w,
                             const std::string& prefix, int window) {
  CheckWindow(window);
  const std::string g = prefix + "g_lc_attn.";
  const Tensor x = KeepPass(anchor, Pass::kAnchor);
  const Tensor q = LinearW(x, w, g + "q");
  const Tensor k = LinearW(x, w, g + "k");
  const Tensor v = LinearW(x, w, g + "v");
  Tensor t = ConvW(WindowAttention(q, k, v, window), w, g + "fuse", window / 2);
  return FfnResidual(std::move(t), w, g);
}

IntraAttentionMap ComputeIntraMap(const Tensor& prev_slice,
                                  const CheckerboardPartition& partition,
                                  const WeightArchive& w, const std::string& prefix,
                                  int window) {
  CheckWindow(window);
  CheckSliceGrid(prev_slice, partition, "ComputeIntraMap");
  const std::string g = prefix + "g_gc_intra.";
  IntraAttentionMap map;
  map.queries = partition.nonanchors;
  map.keys = partition.anchors;
  const Tensor q = LinearW(RowsAt(prev_slice, map.queries), w, g + "q");
  const Tensor k = LinearW(RowsAt(prev_slice, map.keys), w, g + "k");
  map.weights = AttentionWeights(
      q, k, LocalExclusionMask(map.queries, map.keys, (window - 1) / 2));
  return map;
}

Tensor IntraAttention(const IntraAttentionMap& map, const Tensor& anchor_i,
                      const CheckerboardPartition& partition, const WeightArchive& w,
                      const std::string& prefix) {
  CheckSliceGrid(anchor_i, partition, "IntraGlobal");
  if (map.queries != partition.nonanchors || map.keys != partition.anchors) {
    Fail(ErrorKind::kShape, "IntraGlobal: attention map built for another grid");
  }
  const Tensor values =
      LinearW(RowsAt(anchor_i, partition.anchors), w, prefix + "g_gc_intra.v");
  return ApplyAttention(map.weights, values);
}

Tensor IntraGlobal(const IntraAttentionMap& map, const Tensor& anchor_i,
                   const CheckerboardPartition& partition, const WeightArchive& w,
                   const std::string& prefix, int window) {
  CheckWindow(window);
  const Tensor attended = IntraAttention(map, anchor_i, partition, w, prefix);
  const std::string g = prefix + "g_gc_intra.";
  Tensor t = ConvW(GridFromRows(attended, partition.nonanchors, partition.height,
                                partition.width),
                   w, g + "fuse", window / 2);
  AddInPlace(t, GridFromRows(LinearW(RowsAt(anchor_i, partition.anchors), w, g + "v"),
                             partition.anchors, partition.height, partition.width));
  return FfnResidual(std::move(t), w, g);
}

Tensor InterAttention(const Tensor& prev_slice, const Tensor& anchor_i,
                      const CheckerboardPartition& partition, const WeightArchive& w,
                      const std::string& prefix, int window) {
  CheckWindow(window);
  CheckSliceGrid(prev_slice, partition, "InterGlobal");
  CheckSliceGrid(anchor_i, partition, "InterGlobal");
  Check(prev_slice.channels() == anchor_i.channels(), ErrorKind::kShape,
        "InterGlobal: slices differ in width");
  const std::string g = prefix + "g_gc_inter.";
  const std::vector<Position> all = AllPositions(partition.height, partition.width);
  const Tensor q = LinearW(RowsAt(anchor_i, partition.anchors), w, g + "q");
  const Tensor k = LinearW(RowsAt(prev_slice, all), w, g + "k");
  const Tensor values = LinearW(RowsAt(prev_slice, all), w, g + "v");
  const Tensor weights = AttentionWeights(
      q, k, LocalExclusionMask(partition.anchors, all, (window - 1) / 2));
  return ApplyAttention(weights, values);
}

Tensor InterGlobal(const Tensor& prev_slice, const Tensor& anchor_i,
                   const CheckerboardPartition& partition, const WeightArchive& w,
                   const std::string& prefix, int window) {
  const Tensor attended = InterAttention(prev_slice, anchor_i, partition, w, prefix, window);
  const std::string g = prefix + "g_gc_inter.";
  Tensor t = ConvW(GridFromRows(attended, partition.anchors, partition.height,
                                partition.width),
                   w, g + "fuse", window / 2);
  AddInPlace(t, LinearW(prev_slice, w, g + "v"));
  return FfnResidual(std::move(t), w, g);
}

Tensor LatentResidual(const Tensor& phi_h, std::span<const Tensor> slices,
                      const WeightArchive& w, const std::string& prefix) {
  std::vector<const Tensor*> parts{&phi_h};
  for (const Tensor& s : slices) parts.push_back(&s);
  Tensor x = ConvW(ConcatChannels(parts), w, prefix + "lrp.0", kLrpKernel / 2);
  GeluInPlace(x);
  x = ConvW(x, w, prefix + "lrp.1", kLrpKernel / 2);
  GeluInPlace(x);
  return ConvW(x, w, prefix + "lrp.2", kLrpKernel / 2);
}

Tensor RefineSlice(const Tensor& slice, const Tensor& residual) {
  Check(slice.shape() == residual.shape(), ErrorKind::kShape,
        "RefineSlice: " + ShapeString(slice.shape()) + " vs " +
            ShapeString(residual.shape()));
  Tensor out = slice;
  for (size_t i = 0; i < out.size(); ++i) out[i] += 0.5f * std::tanh(residual[i]);
  return out;
}

float Softplus(float x) {
  // log1p(exp(x)) without overflow for large x.
  return x > 0.0f ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

GaussianParams EntropyParams(const ContextBundle& b, const WeightArchive& w,
                             const std::string& prefix) {
  Tensor x = ConcatChannels(
      {&b.phi_h, &b.phi_ch, &b.phi_lc, &b.phi_gc_intra, &b.phi_gc_inter});
  x = LinearW(x, w, prefix + "g_ep.0");
  GeluInPlace(x);
  x = LinearW(x, w, prefix + "g_ep.1");
  GeluInPlace(x);
  x = LinearW(x, w, prefix + "g_ep.2");
  const int s = x.channels() / 2;
  GaussianParams params{x.Channels(0, s), x.Channels(s, 2 * s)};
  for (float& v : params.sigma.span()) v = std::max(Softplus(v), kSigmaMin);
  return params;
}

}  // namespace mlic
