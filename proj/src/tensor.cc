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

#include "mlic/tensor.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>
#include <numeric>
#include <sstream>

#include "mlic/error.h"
#include "mlic/parallel.h"

namespace mlic {
namespace {

size_t NumElements(const Shape& shape) {
  size_t n = 1;
  for (int d : shape) {
    if (d < 0) Fail(ErrorKind::kShape, "negative dimension in " + ShapeString(shape));
    n *= static_cast<size_t>(d);
  }
  return n;
}

void CheckRank(const Tensor& t, int rank, const char* what) {
  if (t.rank() != rank) {
    Fail(ErrorKind::kShape, std::string(what) + ": expected rank " +
                                std::to_string(rank) + ", got " +
                                ShapeString(t.shape()));
  }
}

void CheckBias(const Tensor& bias, int channels, const char* what) {
  if (bias.empty()) return;
  if (bias.rank() != 1 || bias.dim(0) != channels) {
    Fail(ErrorKind::kShape, std::string(what) + ": bias " +
                                ShapeString(bias.shape()) + " for " +
                                std::to_string(channels) + " channels");
  }
}

constexpr int kOcBlock = 4;
constexpr int kColTile = 8;
// Rows are over-allocated by this much so a column tile may read past the
// last valid column; those lanes are discarded.
constexpr int kSlack = kColTile;

// One output row of a kOcBlock-channel block:
//   out[j][c] = bias[j] + sum_t w[t][j] * bases[t][row_offset + c]
// with t running in the caller's tap order. Lanes are independent and
// contraction is off, so the vector width only changes speed, never the
// result.
using Lanes = float __attribute__((vector_size(kColTile * sizeof(float))));

[[gnu::target_clones("avx2", "default")]]
void AccumulateRow(const float* const* bases, size_t count, ptrdiff_t row_offset,
                   const float* weights, const float* bias, int cols,
                   float* const* out, ptrdiff_t col_stride) {
  for (int c0 = 0; c0 < cols; c0 += kColTile) {
    Lanes acc0 = Lanes{} + bias[0];
    Lanes acc1 = Lanes{} + bias[1];
    Lanes acc2 = Lanes{} + bias[2];
    Lanes acc3 = Lanes{} + bias[3];
    const ptrdiff_t off = row_offset + c0;
    for (size_t t = 0; t < count; ++t) {
      Lanes src;
      std::memcpy(&src, bases[t] + off, sizeof(src));
      const float* wt = weights + t * kOcBlock;
      acc0 += wt[0] * src;
      acc1 += wt[1] * src;
      acc2 += wt[2] * src;
      acc3 += wt[3] * src;
    }
    const Lanes acc[kOcBlock] = {acc0, acc1, acc2, acc3};
    const int n = std::min(kColTile, cols - c0);
    for (int j = 0; j < kOcBlock; ++j) {
      if (!out[j]) continue;
      for (int i = 0; i < n; ++i) out[j][(c0 + i) * col_stride] = acc[j][i];
    }
  }
}

// Weights regrouped per output-channel block as [block][tap][ic][j], zero
// for channels past the end.
template <typename WeightAt>
std::vector<float> PackWeights(int blocks, int out_ch, size_t taps_ic,
                               const WeightAt& weight_at) {
  std::vector<float> packed(static_cast<size_t>(blocks) * taps_ic * kOcBlock, 0.0f);
  for (int b = 0; b < blocks; ++b) {
    for (size_t t = 0; t < taps_ic; ++t) {
      for (int j = 0; j < kOcBlock; ++j) {
        const int oc = b * kOcBlock + j;
        if (oc < out_ch) {
          packed[(static_cast<size_t>(b) * taps_ic + t) * kOcBlock + j] = weight_at(t, oc);
        }
      }
    }
  }
  return packed;
}

}  // namespace

std::string ShapeString(const Shape& shape) {
  std::ostringstream os;
  os << '(';
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ", ";
    os << shape[i];
  }
  os << ')';
  return os.str();
}

Tensor::Tensor(Shape shape, float fill)
    : shape_(std::move(shape)), data_(NumElements(shape_), fill) {}

Tensor::Tensor(Shape shape, std::vector<float> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (data_.size() != NumElements(shape_)) {
    Fail(ErrorKind::kShape, "data length " + std::to_string(data_.size()) +
                                " does not match " + ShapeString(shape_));
  }
}

Tensor Tensor::Channels(int begin, int end) const {
  CheckRank(*this, 3, "Channels");
  Check(0 <= begin && begin <= end && end <= channels(), ErrorKind::kShape,
        "channel range out of bounds for " + ShapeString(shape_));
  Tensor out({end - begin, height(), width()});
  std::copy(channel(begin), channel(begin) + (end - begin) * plane(),
            out.data());
  return out;
}

bool Tensor::AllFinite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](float v) { return std::isfinite(v); });
}

Tensor ConcatChannels(std::span<const Tensor* const> parts) {
  Check(!parts.empty(), ErrorKind::kShape, "ConcatChannels: no inputs");
  const int h = parts[0]->height();
  const int w = parts[0]->width();
  int total = 0;
  for (const Tensor* p : parts) {
    CheckRank(*p, 3, "ConcatChannels");
    Check(p->height() == h && p->width() == w, ErrorKind::kShape,
          "ConcatChannels: spatial mismatch " + ShapeString(p->shape()));
    total += p->channels();
  }
  Tensor out({total, h, w});
  float* dst = out.data();
  for (const Tensor* p : parts) {
    dst = std::copy(p->data(), p->data() + p->size(), dst);
  }
  return out;
}

Tensor ConcatChannels(std::initializer_list<const Tensor*> parts) {
  return ConcatChannels(std::span<const Tensor* const>(parts.begin(), parts.size()));
}

bool BitIdentical(const Tensor& a, const Tensor& b) {
  return a.shape() == b.shape() &&
         std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0;
}

Tensor Conv2d(const Tensor& input, const Tensor& kernel, int stride,
              int padding) {
  return Conv2d(input, kernel, Tensor(), stride, padding);
}

Tensor Conv2d(const Tensor& input, const Tensor& kernel, const Tensor& bias,
              int stride, int padding) {
  CheckRank(input, 3, "Conv2d input");
  CheckRank(kernel, 4, "Conv2d kernel");
  Check(stride >= 1 && padding >= 0, ErrorKind::kShape,
        "Conv2d: stride must be positive and padding non-negative");
  const int out_ch = kernel.dim(0);
  const int k = kernel.dim(2);
  if (kernel.dim(1) != input.channels() || kernel.dim(3) != k) {
    Fail(ErrorKind::kShape, "Conv2d: kernel " + ShapeString(kernel.shape()) +
                                " does not fit input " +
                                ShapeString(input.shape()));
  }
  CheckBias(bias, out_ch, "Conv2d");
  const int in_ch = input.channels();
  const int h = input.height();
  const int w = input.width();
  const int span_h = h + 2 * padding - k;
  const int span_w = w + 2 * padding - k;
  Check(span_h >= 0 && span_w >= 0, ErrorKind::kShape,
        "Conv2d: kernel larger than padded input " + ShapeString(input.shape()));
  const int ho = span_h / stride + 1;
  const int wo = span_w / stride + 1;
  Tensor out({out_ch, ho, wo});

  // Zero-padded input split into `stride` column phases, so every tap reads
  // a contiguous run: padded column ox*stride + kx lives in phase kx % stride
  // at column ox + kx / stride.
  const int hp = h + 2 * padding;
  const int wq = (w + 2 * padding + stride - 1) / stride;
  const size_t phase_plane = static_cast<size_t>(hp) * wq;
  std::vector<float> buf(static_cast<size_t>(in_ch) * stride * phase_plane + kSlack, 0.0f);
  for (int ic = 0; ic < in_ch; ++ic) {
    const float* src = input.channel(ic);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const int px = x + padding;
        buf[(static_cast<size_t>(ic) * stride + px % stride) * phase_plane +
            static_cast<size_t>(y + padding) * wq + px / stride] = src[y * w + x];
      }
    }
  }
  // Tap order, and so the order of every output's sum: ky, kx, ic.
  const size_t taps_ic = static_cast<size_t>(k) * k * in_ch;
  std::vector<const float*> bases(taps_ic);
  for (int ky = 0; ky < k; ++ky) {
    for (int kx = 0; kx < k; ++kx) {
      for (int ic = 0; ic < in_ch; ++ic) {
        bases[(static_cast<size_t>(ky) * k + kx) * in_ch + ic] =
            buf.data() + (static_cast<size_t>(ic) * stride + kx % stride) * phase_plane +
            static_cast<size_t>(ky) * wq + kx / stride;
      }
    }
  }
  const int blocks = (out_ch + kOcBlock - 1) / kOcBlock;
  const std::vector<float> packed =
      PackWeights(blocks, out_ch, taps_ic, [&](size_t t, int oc) {
        const size_t tap = t / in_ch;
        const size_t ic = t % in_ch;
        return kernel[(static_cast<size_t>(oc) * in_ch + ic) * k * k + tap];
      });
  const ptrdiff_t row_step = static_cast<ptrdiff_t>(stride) * wq;
  ParallelFor(static_cast<size_t>(blocks) * ho, [&](size_t item) {
    // Row-major so one input window serves every output block.
    const int b = static_cast<int>(item % blocks);
    const int oy = static_cast<int>(item / blocks);
    float b4[kOcBlock] = {};
    float* rows[kOcBlock] = {};
    for (int j = 0; j < kOcBlock; ++j) {
      const int oc = b * kOcBlock + j;
      if (oc >= out_ch) continue;
      if (!bias.empty()) b4[j] = bias[oc];
      rows[j] = out.channel(oc) + static_cast<size_t>(oy) * wo;
    }
    AccumulateRow(bases.data(), taps_ic, oy * row_step,
                  packed.data() + static_cast<size_t>(b) * taps_ic * kOcBlock, b4, wo,
                  rows, 1);
  });
  return out;
}

Tensor ConvTranspose2d(const Tensor& input, const Tensor& kernel,
                       const Tensor& bias, int stride, int padding,
                       int output_padding) {
  CheckRank(input, 3, "ConvTranspose2d input");
  CheckRank(kernel, 4, "ConvTranspose2d kernel");
  const int in_ch = input.channels();
  const int k = kernel.dim(2);
  if (kernel.dim(0) != in_ch || kernel.dim(3) != k) {
    Fail(ErrorKind::kShape, "ConvTranspose2d: kernel " +
                                ShapeString(kernel.shape()) +
                                " does not fit input " +
                                ShapeString(input.shape()));
  }
  Check(stride >= 1 && padding >= 0 && output_padding >= 0 &&
            output_padding < stride,
        ErrorKind::kShape, "ConvTranspose2d: invalid stride/padding");
  const int out_ch = kernel.dim(1);
  CheckBias(bias, out_ch, "ConvTranspose2d");
  const int h = input.height();
  const int w = input.width();
  const int ho = (h - 1) * stride - 2 * padding + k + output_padding;
  const int wo = (w - 1) * stride - 2 * padding + k + output_padding;
  Check(ho > 0 && wo > 0, ErrorKind::kShape, "ConvTranspose2d: empty output");
  Tensor out({out_ch, ho, wo});

  // Gather form per output phase (py, px): output (py + s*t, px + s*u) reads
  // input (t + dy, u + dx) through the taps with ky = py + padding - s*dy.
  const int margin = k;
  const int hp = h + 2 * margin;
  const int wp = w + 2 * margin;
  const size_t plane = static_cast<size_t>(hp) * wp;
  std::vector<float> buf(static_cast<size_t>(in_ch) * plane + kSlack, 0.0f);
  for (int ic = 0; ic < in_ch; ++ic) {
    for (int y = 0; y < h; ++y) {
      std::copy_n(input.channel(ic) + static_cast<size_t>(y) * w, w,
                  buf.data() + ic * plane + static_cast<size_t>(y + margin) * wp + margin);
    }
  }
  const int blocks = (out_ch + kOcBlock - 1) / kOcBlock;
  const size_t kk = static_cast<size_t>(k) * k;

  struct Phase {
    int py, px, rows, cols;
    std::vector<const float*> bases;
    std::vector<float> packed;
  };
  std::vector<Phase> phases;
  for (int py = 0; py < stride; ++py) {
    for (int px = 0; px < stride; ++px) {
      Phase ph{py, px, (ho - py + stride - 1) / stride, (wo - px + stride - 1) / stride, {}, {}};
      if (ph.rows <= 0 || ph.cols <= 0) continue;
      std::vector<int> tap_index;
      for (int ky = 0; ky < k; ++ky) {
        if ((py + padding - ky) % stride != 0) continue;
        const int dy = (py + padding - ky) / stride;
        for (int kx = 0; kx < k; ++kx) {
          if ((px + padding - kx) % stride != 0) continue;
          const int dx = (px + padding - kx) / stride;
          tap_index.push_back(ky * k + kx);
          for (int ic = 0; ic < in_ch; ++ic) {
            ph.bases.push_back(buf.data() + ic * plane +
                               static_cast<ptrdiff_t>(dy + margin) * wp + dx + margin);
          }
        }
      }
      ph.packed = PackWeights(blocks, out_ch, ph.bases.size(), [&](size_t t, int oc) {
        const size_t tap = tap_index[t / in_ch];
        const size_t ic = t % in_ch;
        return kernel[(ic * out_ch + oc) * kk + tap];
      });
      phases.push_back(std::move(ph));
    }
  }
  for (const Phase& ph : phases) {
    ParallelFor(static_cast<size_t>(blocks) * ph.rows, [&](size_t item) {
      const int b = static_cast<int>(item % blocks);
      const int t = static_cast<int>(item / blocks);
      const int oy = ph.py + stride * t;
      float b4[kOcBlock] = {};
      float* rows[kOcBlock] = {};
      for (int j = 0; j < kOcBlock; ++j) {
        const int oc = b * kOcBlock + j;
        if (oc >= out_ch) continue;
        if (!bias.empty()) b4[j] = bias[oc];
        rows[j] = out.channel(oc) + static_cast<size_t>(oy) * wo + ph.px;
      }
      AccumulateRow(ph.bases.data(), ph.bases.size(), static_cast<ptrdiff_t>(t) * wp,
                    ph.packed.data() + static_cast<size_t>(b) * ph.bases.size() * kOcBlock,
                    b4, ph.cols, rows, stride);
    });
  }
  return out;
}

Tensor Linear(const Tensor& input, const Tensor& weight, const Tensor& bias) {
  CheckRank(weight, 2, "Linear weight");
  const int out_dim = weight.dim(0);
  const int in_dim = weight.dim(1);
  CheckBias(bias, out_dim, "Linear");
  if (input.rank() == 2) {
    Check(input.dim(1) == in_dim, ErrorKind::kShape,
          "Linear: input " + ShapeString(input.shape()) + " vs weight " +
              ShapeString(weight.shape()));
    const int rows = input.dim(0);
    Tensor out({rows, out_dim});
    for (int r = 0; r < rows; ++r) {
      const float* x = input.data() + static_cast<size_t>(r) * in_dim;
      for (int o = 0; o < out_dim; ++o) {
        const float* wrow = weight.data() + static_cast<size_t>(o) * in_dim;
        float acc = bias.empty() ? 0.0f : bias[o];
        for (int i = 0; i < in_dim; ++i) acc += wrow[i] * x[i];
        out[static_cast<size_t>(r) * out_dim + o] = acc;
      }
    }
    return out;
  }
  CheckRank(input, 3, "Linear input");
  Check(input.channels() == in_dim, ErrorKind::kShape,
        "Linear: input " + ShapeString(input.shape()) + " vs weight " +
            ShapeString(weight.shape()));
  const int h = input.height();
  const int w = input.width();
  Tensor out({out_dim, h, w});
  // Rows laid out [y][in][x]: the inputs of one output row are contiguous
  // instead of a plane apart.
  std::vector<float> buf(input.size() + kSlack, 0.0f);
  for (int i = 0; i < in_dim; ++i) {
    for (int y = 0; y < h; ++y) {
      std::copy_n(input.channel(i) + static_cast<size_t>(y) * w, w,
                  buf.data() + (static_cast<size_t>(y) * in_dim + i) * w);
    }
  }
  std::vector<const float*> bases(in_dim);
  for (int i = 0; i < in_dim; ++i) bases[i] = buf.data() + static_cast<size_t>(i) * w;
  const int blocks = (out_dim + kOcBlock - 1) / kOcBlock;
  const std::vector<float> packed = PackWeights(
      blocks, out_dim, in_dim,
      [&](size_t i, int o) { return weight[static_cast<size_t>(o) * in_dim + i]; });
  ParallelFor(static_cast<size_t>(blocks) * h, [&](size_t item) {
    const int b = static_cast<int>(item % blocks);
    const int y = static_cast<int>(item / blocks);
    float b4[kOcBlock] = {};
    float* rows[kOcBlock] = {};
    for (int j = 0; j < kOcBlock; ++j) {
      const int o = b * kOcBlock + j;
      if (o >= out_dim) continue;
      if (!bias.empty()) b4[j] = bias[o];
      rows[j] = out.channel(o) + static_cast<size_t>(y) * w;
    }
    AccumulateRow(bases.data(), in_dim, static_cast<ptrdiff_t>(y) * in_dim * w,
                  packed.data() + static_cast<size_t>(b) * in_dim * kOcBlock, b4, w, rows, 1);
  });
  return out;
}

float Gelu(float x) {
  return 0.5f * x * (1.0f + std::erf(x * 0.70710678118654752f));
}

void GeluInPlace(Tensor& t) {
  for (float& v : t.span()) v = Gelu(v);
}

Tensor Gelu(const Tensor& input) {
  Tensor out = input;
  GeluInPlace(out);
  return out;
}

Tensor Gdn(const Tensor& input, const Tensor& beta, const Tensor& gamma,
           bool inverse) {
  CheckRank(input, 3, "Gdn input");
  const int c = input.channels();
  Check(beta.rank() == 1 && beta.dim(0) == c, ErrorKind::kShape,
        "Gdn: beta " + ShapeString(beta.shape()) + " for " +
            std::to_string(c) + " channels");
  Check(gamma.rank() == 2 && gamma.dim(0) == c && gamma.dim(1) == c,
        ErrorKind::kShape, "Gdn: gamma " + ShapeString(gamma.shape()));
  for (int i = 0; i < c; ++i) {
    Check(beta[i] > 0.0f, ErrorKind::kShape, "Gdn: beta must be positive");
  }
  const size_t plane = input.plane();
  std::vector<float> squared(input.size());
  for (size_t i = 0; i < input.size(); ++i) squared[i] = input[i] * input[i];
  Tensor out(input.shape());
  ParallelFor(c, [&](size_t ch) {
    std::vector<float> norm(plane, beta[ch]);
    const float* grow = gamma.data() + ch * c;
    for (int k = 0; k < c; ++k) {
      const float g = grow[k];
      const float* sq = squared.data() + k * plane;
      for (size_t p = 0; p < plane; ++p) norm[p] += g * sq[p];
    }
    const float* src = input.channel(static_cast<int>(ch));
    float* dst = out.channel(static_cast<int>(ch));
    for (size_t p = 0; p < plane; ++p) {
      const float s = std::sqrt(norm[p]);
      dst[p] = inverse ? src[p] * s : src[p] / s;
    }
  });
  return out;
}

void MaskedSoftmaxRow(std::span<const float> scores,
                      std::span<const uint8_t> allowed, std::span<float> out) {
  const size_t n = scores.size();
  float max_score = 0.0f;
  bool any = false;
  for (size_t j = 0; j < n; ++j) {
    if (!allowed[j]) continue;
    if (!any || scores[j] > max_score) max_score = scores[j];
    any = true;
  }
  if (!any) {
    std::fill(out.begin(), out.end(), 0.0f);
    return;
  }
  float sum = 0.0f;
  for (size_t j = 0; j < n; ++j) {
    if (allowed[j]) {
      out[j] = std::exp(scores[j] - max_score);
      sum += out[j];
    } else {
      out[j] = 0.0f;
    }
  }
  const float inv = 1.0f / sum;
  for (size_t j = 0; j < n; ++j) {
    if (allowed[j]) out[j] *= inv;
  }
}

Tensor MaskedSoftmax(const Tensor& scores, const AttentionMask& mask) {
  CheckRank(scores, 2, "MaskedSoftmax scores");
  Check(scores.dim(0) == mask.queries() && scores.dim(1) == mask.keys(),
        ErrorKind::kShape,
        "MaskedSoftmax: scores " + ShapeString(scores.shape()) +
            " vs mask (" + std::to_string(mask.queries()) + ", " +
            std::to_string(mask.keys()) + ")");
  Tensor out(scores.shape());
  const size_t keys = mask.keys();
  for (int q = 0; q < mask.queries(); ++q) {
    MaskedSoftmaxRow(scores.span().subspan(q * keys, keys), mask.row(q),
                     out.span().subspan(q * keys, keys));
  }
  return out;
}

void AddInPlace(Tensor& acc, const Tensor& other) {
  Check(acc.shape() == other.shape(), ErrorKind::kShape,
        "AddInPlace: " + ShapeString(acc.shape()) + " vs " +
            ShapeString(other.shape()));
  float* a = acc.data();
  const float* b = other.data();
  for (size_t i = 0; i < acc.size(); ++i) a[i] += b[i];
}

}  // namespace mlic
