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

// End-to-end codec: transforms, z coding, the per-slice two-pass schedule
// and the container.
//
// Per slice i the schedule is:
//   anchor pass     params from (hyper, channel context of refined slices < i)
//   local context   from the decoded anchors of slice i
//   global context  intra (map of slice i-1, values of slice i anchors) and
//                   inter (slice i anchors against slice i-1)
//   non-anchor pass params from all of the above
//   refinement      slice i + 0.5 tanh(residual), used by g_s and later slices
// Encoder, decoder, rate estimation and symbol replay all run this one
// routine with a different symbol source, so they cannot drift apart.
//
// Bit-exactness holds for one build on one platform; floats are not
// guaranteed to agree across compilers or architectures.

#ifndef MLIC_CODEC_H_
#define MLIC_CODEC_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mlic/container.h"
#include "mlic/entropy.h"
#include "mlic/latent_layout.h"
#include "mlic/mem_contexts.h"
#include "mlic/transforms.h"
#include "mlic/weight_archive.h"

namespace mlic {

struct ModelConfig {
  TransformSpec transform;
  MemConfig mem;

  static ModelConfig Mlic();
  static ModelConfig MlicPlus();
  // "mlic" or "mlic+"; throws kUsage otherwise.
  static ModelConfig FromName(const std::string& name);

  void Validate() const;
  SlicePlan Slices() const;
  std::vector<TensorSpec> Manifest() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

WeightArchive SeedModelArchive(uint64_t seed, const ModelConfig& config);

// Every coded symbol of one image: z offsets (N, zh, zw) and latent
// offsets (M, h, w), both row-major grids.
struct LatentSymbols {
  int z_height = 0;
  int z_width = 0;
  std::vector<int32_t> z;
  int height = 0;
  int width = 0;
  std::vector<int32_t> y;

  friend bool operator==(const LatentSymbols&, const LatentSymbols&) = default;
};

struct SectionStats {
  std::string name;
  size_t symbols = 0;
  double est_bits = 0.0;
};

struct CodingTrace {
  LatentSymbols symbols;
  Tensor y_hat;      // (M, h, w) offsets + means, before refinement
  Tensor y_refined;  // after refinement; input to g_s
  std::vector<GaussianParams> anchor_params;     // per slice, full grids
  std::vector<GaussianParams> nonanchor_params;  // per slice, full grids
  std::vector<SectionStats> sections;
  RateReport estimate;
  // Slices fully decoded so far (a failed decode leaves the prefix).
  int completed_slices = 0;
};

struct EncodeResult {
  std::vector<uint8_t> bytes;
  Container container;
  CodingTrace trace;
  Tensor reconstruction;  // cropped x_hat, only when requested
};

struct DecodeResult {
  ContainerHeader header;
  CodingTrace trace;
  Tensor reconstruction;  // cropped x_hat
};

// Header fields a container needs to be decoded with `config`.
ModelConfig ConfigFromHeader(const ContainerHeader& header);

class Codec {
 public:
  // Throws kManifest with the full diff when the archive does not fit.
  Codec(ModelConfig config, const WeightArchive& weights);

  const ModelConfig& config() const { return config_; }
  const WeightArchive& weights() const { return weights_; }
  uint64_t archive_hash() const { return archive_hash_; }

  // image: (3, H, W) in [0, 1]; padded internally.
  EncodeResult Encode(const Tensor& image, bool reconstruct = false) const;
  // `partial`, when given, receives the trace even if decoding throws.
  DecodeResult Decode(std::span<const uint8_t> bytes,
                      CodingTrace* partial = nullptr) const;
  // Full context pipeline without the coder.
  CodingTrace Estimate(const Tensor& image) const;
  // Runs the schedule on given symbols (no transforms, no coder).
  CodingTrace Replay(const LatentSymbols& symbols) const;

  Tensor Reconstruct(const CodingTrace& trace, int height, int width) const;

 private:
  struct Analysis;
  Analysis Analyze(const Tensor& image) const;

  ModelConfig config_;
  const WeightArchive& weights_;
  uint64_t archive_hash_ = 0;
  ZModel z_model_;
};

}  // namespace mlic

#endif  // MLIC_CODEC_H_
