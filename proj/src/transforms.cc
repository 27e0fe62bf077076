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

#include "mlic/transforms.h"

#include <algorithm>
#include <string>

#include "mlic/error.h"

namespace mlic {
namespace {

constexpr int kStrideKernel = 5;
constexpr int kResKernel = 3;

std::string Name(const char* module, int stage, const char* leaf) {
  return std::string(module) + "." + std::to_string(stage) + "." + leaf;
}

std::string ResName(const char* module, int stage, int block) {
  return std::string(module) + "." + std::to_string(stage) + ".res" +
         std::to_string(block);
}

void AddConv(std::vector<TensorSpec>* m, const std::string& prefix, int out,
             int in, int k, float scale = 1.0f) {
  m->push_back({prefix + ".w", {out, in, k, k}, Init::kHeUniform, in * k * k, scale});
  m->push_back({prefix + ".b", {out}, Init::kSmallBias, 1, 1.0f});
}

// Transposed kernel layout (in, out, K, K); each output sees ~in*K*K/4 taps
// for stride 2.
void AddDeconv(std::vector<TensorSpec>* m, const std::string& prefix, int in,
               int out, int k) {
  m->push_back({prefix + ".w", {in, out, k, k}, Init::kHeUniform,
                std::max(1, in * k * k / 4), 1.0f});
  m->push_back({prefix + ".b", {out}, Init::kSmallBias, 1, 1.0f});
}

void AddGdn(std::vector<TensorSpec>* m, const std::string& prefix, int c) {
  m->push_back({prefix + ".beta", {c}, Init::kGdnBeta, 1, 1.0f});
  m->push_back({prefix + ".gamma", {c, c}, Init::kGdnGamma, 1, 1.0f});
}

void AddResBlock(std::vector<TensorSpec>* m, const std::string& prefix, int c) {
  AddConv(m, prefix + ".conv1", c, c, kResKernel);
  AddConv(m, prefix + ".conv2", c, c, kResKernel, 0.5f);
}

Tensor ConvLayer(const Tensor& x, const WeightArchive& w,
                 const std::string& prefix, int stride, int padding) {
  return Conv2d(x, w.Get(prefix + ".w"), w.Get(prefix + ".b"), stride, padding);
}

Tensor DeconvLayer(const Tensor& x, const WeightArchive& w,
                   const std::string& prefix) {
  return ConvTranspose2d(x, w.Get(prefix + ".w"), w.Get(prefix + ".b"), 2,
                         kStrideKernel / 2, 1);
}

void ResBlock(Tensor& x, const WeightArchive& w, const std::string& prefix) {
  Tensor t = ConvLayer(x, w, prefix + ".conv1", 1, kResKernel / 2);
  GeluInPlace(t);
  t = ConvLayer(t, w, prefix + ".conv2", 1, kResKernel / 2);
  AddInPlace(x, t);
}

Tensor GdnLayer(const Tensor& x, const WeightArchive& w,
                const std::string& prefix, bool inverse) {
  return Gdn(x, w.Get(prefix + ".beta"), w.Get(prefix + ".gamma"), inverse);
}

}  // namespace

void TransformSpec::Validate() const {
  Check(n_channels > 0 && m_channels > 0, ErrorKind::kUsage,
        "TransformSpec: channel counts must be positive");
  Check(downsample_stages >= 1 && downsample_stages <= 6, ErrorKind::kUsage,
        "TransformSpec: downsample_stages must be in [1, 6]");
  Check(residual_blocks_per_stage >= 0, ErrorKind::kUsage,
        "TransformSpec: residual_blocks_per_stage must be non-negative");
}

void AppendTransformManifest(const TransformSpec& spec,
                             std::vector<TensorSpec>* m) {
  spec.Validate();
  const int n = spec.n_channels;
  const int mc = spec.m_channels;
  const int last = spec.downsample_stages - 1;
  for (int s = 0; s <= last; ++s) {
    const int in = s == 0 ? 3 : n;
    const int out = s == last ? mc : n;
    AddConv(m, Name("g_a", s, "conv"), out, in, kStrideKernel);
    if (s == last) continue;
    AddGdn(m, Name("g_a", s, "gdn"), n);
    for (int r = 0; r < spec.residual_blocks_per_stage; ++r) {
      AddResBlock(m, ResName("g_a", s, r), n);
    }
  }
  // g_s stage s undoes g_a stage (last - s).
  for (int s = 0; s <= last; ++s) {
    const int in = s == 0 ? mc : n;
    const int out = s == last ? 3 : n;
    AddDeconv(m, Name("g_s", s, "deconv"), in, out, kStrideKernel);
    if (s == last) continue;
    for (int r = 0; r < spec.residual_blocks_per_stage; ++r) {
      AddResBlock(m, ResName("g_s", s, r), n);
    }
    AddGdn(m, Name("g_s", s, "igdn"), n);
  }
  AddConv(m, "h_a.0", n, mc, kStrideKernel);
  AddConv(m, "h_a.1", n, n, kStrideKernel);
  AddDeconv(m, "h_s.0", n, n, kStrideKernel);
  AddDeconv(m, "h_s.1", n, 2 * mc, kStrideKernel);
}

Tensor Analyze(const Tensor& image, const WeightArchive& weights,
               const TransformSpec& spec) {
  spec.Validate();
  Check(image.rank() == 3 && image.channels() == 3, ErrorKind::kShape,
        "Analyze: expected a (3, H, W) image, got " + ShapeString(image.shape()));
  const int multiple = spec.PadMultiple();
  if (image.height() % multiple != 0 || image.width() % multiple != 0 ||
      image.height() == 0 || image.width() == 0) {
    Fail(ErrorKind::kShape, "Analyze: image " + ShapeString(image.shape()) +
                                " is not a multiple of " +
                                std::to_string(multiple) + " (pad first)");
  }
  const int last = spec.downsample_stages - 1;
  Tensor x = image;
  for (int s = 0; s <= last; ++s) {
    x = ConvLayer(x, weights, Name("g_a", s, "conv"), 2, kStrideKernel / 2);
    if (s == last) break;
    x = GdnLayer(x, weights, Name("g_a", s, "gdn"), false);
    for (int r = 0; r < spec.residual_blocks_per_stage; ++r) {
      ResBlock(x, weights, ResName("g_a", s, r));
    }
  }
  return x;
}

Tensor Synthesize(const Tensor& y_hat, const WeightArchive& weights,
                  const TransformSpec& spec) {
  spec.Validate();
  if (y_hat.rank() != 3 || y_hat.channels() != spec.m_channels) {
    Fail(ErrorKind::kShape, "Synthesize: expected (" +
                                std::to_string(spec.m_channels) +
                                ", h, w) latent, got " +
                                ShapeString(y_hat.shape()));
  }
  const int last = spec.downsample_stages - 1;
  Tensor x = y_hat;
  for (int s = 0; s <= last; ++s) {
    x = DeconvLayer(x, weights, Name("g_s", s, "deconv"));
    if (s == last) break;
    for (int r = 0; r < spec.residual_blocks_per_stage; ++r) {
      ResBlock(x, weights, ResName("g_s", s, r));
    }
    x = GdnLayer(x, weights, Name("g_s", s, "igdn"), true);
  }
  for (float& v : x.span()) v = std::clamp(v, 0.0f, 1.0f);
  return x;
}

Tensor HyperAnalyze(const Tensor& y, const WeightArchive& weights,
                    const TransformSpec& spec) {
  if (y.rank() != 3 || y.channels() != spec.m_channels) {
    Fail(ErrorKind::kShape, "HyperAnalyze: expected (" +
                                std::to_string(spec.m_channels) +
                                ", h, w), got " + ShapeString(y.shape()));
  }
  if (y.height() % 4 != 0 || y.width() % 4 != 0 || y.height() == 0 ||
      y.width() == 0) {
    Fail(ErrorKind::kShape, "HyperAnalyze: latent " + ShapeString(y.shape()) +
                                " spatial dims must be multiples of 4");
  }
  Tensor x = ConvLayer(y, weights, "h_a.0", 2, kStrideKernel / 2);
  GeluInPlace(x);
  return ConvLayer(x, weights, "h_a.1", 2, kStrideKernel / 2);
}

Tensor HyperSynthesize(const Tensor& z_hat, const WeightArchive& weights,
                       const TransformSpec& spec) {
  if (z_hat.rank() != 3 || z_hat.channels() != spec.n_channels) {
    Fail(ErrorKind::kShape, "HyperSynthesize: expected (" +
                                std::to_string(spec.n_channels) +
                                ", h, w), got " + ShapeString(z_hat.shape()));
  }
  Tensor x = DeconvLayer(z_hat, weights, "h_s.0");
  GeluInPlace(x);
  return DeconvLayer(x, weights, "h_s.1");
}

}  // namespace mlic
