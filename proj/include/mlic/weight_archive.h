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

// Named tensor store for every learned parameter, plus the deterministic
// synthetic initializer used when no trained weights are available.
//
// File layout (all integers little-endian):
//   "MLWA" | u32 version=1 | u32 count
//   count x { u16 name_len | name | u8 rank | u32 dims[rank] | f32 data[] }
//   u64 content hash (FNV-1a 64 over everything that precedes it)
// Tensors are stored sorted by name.

#ifndef MLIC_WEIGHT_ARCHIVE_H_
#define MLIC_WEIGHT_ARCHIVE_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mlic/tensor.h"

namespace mlic {

// xoshiro256** seeded through splitmix64.
class Xoshiro256 {
 public:
  explicit Xoshiro256(uint64_t seed);
  uint64_t Next();
  // Uniform in [0, 1) with 24 bits of resolution.
  float UniformFloat();
  // Uniform in [lo, hi).
  float Uniform(float lo, float hi) { return lo + (hi - lo) * UniformFloat(); }

 private:
  uint64_t s_[4];
};

uint64_t SplitMix64(uint64_t& state);
uint64_t Fnv1a64(std::span<const uint8_t> bytes, uint64_t hash = 0xcbf29ce484222325ull);

enum class Init {
  kHeUniform,   // U(-a, a), a = scale * sqrt(6 / fan_in)
  kSmallBias,   // U(-0.05, 0.05) * scale
  kGdnBeta,     // 1 + U(0, 0.1)
  kGdnGamma,    // 0.1 on the diagonal plus U(0, 1e-3) everywhere
  kZMean,       // U(-0.1, 0.1)
  kZScale,      // U(0.5, 2)
};

// One entry of a model manifest.
struct TensorSpec {
  std::string name;
  Shape shape;
  Init init = Init::kHeUniform;
  int fan_in = 1;
  float scale = 1.0f;
};

class WeightArchive {
 public:
  bool Contains(const std::string& name) const;
  // Throws kManifest when the tensor is absent.
  const Tensor& Get(const std::string& name) const;
  void Set(const std::string& name, Tensor tensor);

  size_t size() const { return tensors_.size(); }
  std::vector<std::string> Names() const;
  const std::map<std::string, Tensor>& tensors() const { return tensors_; }

  std::vector<uint8_t> Serialize() const;
  static WeightArchive Deserialize(std::span<const uint8_t> bytes);
  void Save(const std::string& path) const;
  static WeightArchive Load(const std::string& path);

  // FNV-1a 64 of the serialized body; identical archives hash identically.
  uint64_t Hash() const;

 private:
  std::map<std::string, Tensor> tensors_;
};

// Lists every missing or mis-shaped tensor; empty when the archive fits.
std::vector<std::string> ManifestDiff(const WeightArchive& archive,
                                      std::span<const TensorSpec> manifest);
// Throws kManifest carrying the full diff listing.
void CheckManifest(const WeightArchive& archive,
                   std::span<const TensorSpec> manifest);

// Every tensor drawn from its own stream keyed by (seed, name), so two
// manifests that share a tensor name also share its values.
WeightArchive SeedArchive(uint64_t seed, std::span<const TensorSpec> manifest);

// All weights and biases zero; GDN beta and z scales one so every layer is
// still well defined.
WeightArchive ZeroArchive(std::span<const TensorSpec> manifest);

}  // namespace mlic

#endif  // MLIC_WEIGHT_ARCHIVE_H_
