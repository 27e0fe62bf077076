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

// Analysis/synthesis transforms and the hyperprior transforms.
//
// g_a: per stage a stride-2 5x5 conv, then (except the last stage) GDN and
//      residual blocks of two 3x3 convs with GELU in between.
// g_s: the mirror image with transposed convs and inverse GDN.
// h_a: two stride-2 5x5 convs with GELU; h_s mirrors it and widens to 2M.

#ifndef MLIC_TRANSFORMS_H_
#define MLIC_TRANSFORMS_H_

#include <vector>

#include "mlic/tensor.h"
#include "mlic/weight_archive.h"

namespace mlic {

struct TransformSpec {
  int n_channels = 192;  // N: hidden width of g_a/g_s and channels of z
  int m_channels = 192;  // M: channels of y
  int downsample_stages = 4;
  int residual_blocks_per_stage = 1;

  static TransformSpec Mlic() { return {192, 192, 4, 1}; }
  static TransformSpec MlicPlus() { return {192, 320, 4, 1}; }

  // Spatial factor between the image and y.
  int LatentFactor() const { return 1 << downsample_stages; }
  // Spatial factor the image must be a multiple of (y and then z).
  int PadMultiple() const { return LatentFactor() * 4; }

  void Validate() const;
  friend bool operator==(const TransformSpec&, const TransformSpec&) = default;
};

void AppendTransformManifest(const TransformSpec& spec,
                             std::vector<TensorSpec>* manifest);

// image (3, H, W), H and W multiples of PadMultiple() -> y (M, H/16, W/16).
Tensor Analyze(const Tensor& image, const WeightArchive& weights,
               const TransformSpec& spec);

// y_hat (M, h, w) -> image (3, 16h, 16w) clamped to [0, 1].
Tensor Synthesize(const Tensor& y_hat, const WeightArchive& weights,
                  const TransformSpec& spec);

// y (M, h, w) -> z (N, h/4, w/4).
Tensor HyperAnalyze(const Tensor& y, const WeightArchive& weights,
                    const TransformSpec& spec);

// z_hat (N, h, w) -> hyperprior features (2M, 4h, 4w).
Tensor HyperSynthesize(const Tensor& z_hat, const WeightArchive& weights,
                       const TransformSpec& spec);

}  // namespace mlic

#endif  // MLIC_TRANSFORMS_H_
