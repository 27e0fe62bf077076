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

#include "mlic/weight_archive.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include "mlic/bytes.h"
#include "mlic/error.h"

namespace mlic {
namespace {

constexpr char kMagic[] = "MLWA";
constexpr uint32_t kVersion = 1;

uint64_t Rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

void FillTensor(const TensorSpec& spec, Xoshiro256& rng, Tensor& t) {
  switch (spec.init) {
    case Init::kHeUniform: {
      const float a = spec.scale * std::sqrt(6.0f / static_cast<float>(std::max(1, spec.fan_in)));
      for (float& v : t.span()) v = rng.Uniform(-a, a);
      break;
    }
    case Init::kSmallBias:
      for (float& v : t.span()) v = spec.scale * rng.Uniform(-0.05f, 0.05f);
      break;
    case Init::kGdnBeta:
      for (float& v : t.span()) v = 1.0f + rng.Uniform(0.0f, 0.1f);
      break;
    case Init::kGdnGamma: {
      const int c = t.dim(0);
      for (int i = 0; i < c; ++i) {
        for (int k = 0; k < c; ++k) {
          t[static_cast<size_t>(i) * c + k] =
              (i == k ? 0.1f : 0.0f) + rng.Uniform(0.0f, 1e-3f);
        }
      }
      break;
    }
    case Init::kZMean:
      for (float& v : t.span()) v = rng.Uniform(-0.1f, 0.1f);
      break;
    case Init::kZScale:
      for (float& v : t.span()) v = rng.Uniform(0.5f, 2.0f);
      break;
  }
}

}  // namespace

uint64_t SplitMix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

uint64_t Fnv1a64(std::span<const uint8_t> bytes, uint64_t hash) {
  for (uint8_t b : bytes) {
    hash ^= b;
    hash *= 0x100000001b3ull;
  }
  return hash;
}

Xoshiro256::Xoshiro256(uint64_t seed) {
  uint64_t state = seed;
  for (uint64_t& s : s_) s = SplitMix64(state);
}

uint64_t Xoshiro256::Next() {
  const uint64_t result = Rotl(s_[1] * 5, 7) * 9;
  const uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = Rotl(s_[3], 45);
  return result;
}

float Xoshiro256::UniformFloat() {
  return static_cast<float>(Next() >> 40) * (1.0f / 16777216.0f);
}

bool WeightArchive::Contains(const std::string& name) const {
  return tensors_.count(name) != 0;
}

const Tensor& WeightArchive::Get(const std::string& name) const {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) {
    Fail(ErrorKind::kManifest, "weight archive has no tensor '" + name + "'");
  }
  return it->second;
}

void WeightArchive::Set(const std::string& name, Tensor tensor) {
  tensors_[name] = std::move(tensor);
}

std::vector<std::string> WeightArchive::Names() const {
  std::vector<std::string> names;
  names.reserve(tensors_.size());
  for (const auto& [name, t] : tensors_) names.push_back(name);
  return names;
}

std::vector<uint8_t> WeightArchive::Serialize() const {
  ByteWriter w;
  w.Text(std::string_view(kMagic, 4));
  w.U32(kVersion);
  w.U32(static_cast<uint32_t>(tensors_.size()));
  for (const auto& [name, t] : tensors_) {
    Check(name.size() < 65536, ErrorKind::kFormat, "tensor name too long");
    w.U16(static_cast<uint16_t>(name.size()));
    w.Text(name);
    w.U8(static_cast<uint8_t>(t.rank()));
    for (int d : t.shape()) w.U32(static_cast<uint32_t>(d));
    for (float v : t.span()) w.F32(v);
  }
  const uint64_t hash = Fnv1a64(w.bytes());
  w.U64(hash);
  return w.Take();
}

WeightArchive WeightArchive::Deserialize(std::span<const uint8_t> bytes) {
  ByteReader r(bytes, "weight archive");
  if (r.Text(4) != std::string_view(kMagic, 4)) {
    Fail(ErrorKind::kFormat, "weight archive: bad magic");
  }
  const uint32_t version = r.U32();
  Check(version == kVersion, ErrorKind::kFormat,
        "weight archive: unsupported version " + std::to_string(version));
  const uint32_t count = r.U32();
  WeightArchive archive;
  for (uint32_t i = 0; i < count; ++i) {
    const uint16_t len = r.U16();
    std::string name = r.Text(len);
    const int rank = r.U8();
    Check(rank >= 1 && rank <= 4, ErrorKind::kFormat,
          "weight archive: tensor '" + name + "' has rank " + std::to_string(rank));
    Shape shape(rank);
    size_t n = 1;
    for (int& d : shape) {
      d = static_cast<int>(r.U32());
      n *= static_cast<size_t>(d);
    }
    Check(n * 4 <= r.remaining(), ErrorKind::kFormat,
          "weight archive: tensor '" + name + "' truncated");
    std::vector<float> data(n);
    for (float& v : data) v = r.F32();
    archive.Set(name, Tensor(std::move(shape), std::move(data)));
  }
  const size_t body = r.position();
  const uint64_t stored = r.U64();
  if (stored != Fnv1a64(bytes.first(body))) {
    Fail(ErrorKind::kFormat, "weight archive: content hash mismatch");
  }
  Check(r.remaining() == 0, ErrorKind::kFormat, "weight archive: trailing bytes");
  return archive;
}

void WeightArchive::Save(const std::string& path) const {
  WriteFileBytes(path, Serialize());
}

WeightArchive WeightArchive::Load(const std::string& path) {
  return Deserialize(ReadFileBytes(path));
}

uint64_t WeightArchive::Hash() const {
  const std::vector<uint8_t> bytes = Serialize();
  return Fnv1a64(std::span<const uint8_t>(bytes).first(bytes.size() - 8));
}

std::vector<std::string> ManifestDiff(const WeightArchive& archive,
                                      std::span<const TensorSpec> manifest) {
  std::vector<std::string> diff;
  for (const TensorSpec& spec : manifest) {
    if (!archive.Contains(spec.name)) {
      diff.push_back("missing " + spec.name + " " + ShapeString(spec.shape));
      continue;
    }
    const Tensor& t = archive.Get(spec.name);
    if (t.shape() != spec.shape) {
      diff.push_back("shape " + spec.name + " " + ShapeString(t.shape()) +
                     " != " + ShapeString(spec.shape));
    }
  }
  return diff;
}

void CheckManifest(const WeightArchive& archive,
                   std::span<const TensorSpec> manifest) {
  const std::vector<std::string> diff = ManifestDiff(archive, manifest);
  if (diff.empty()) return;
  std::ostringstream os;
  os << "weight archive does not match model (" << diff.size() << " issues):";
  for (const std::string& line : diff) os << "\n  " << line;
  Fail(ErrorKind::kManifest, os.str());
}

WeightArchive SeedArchive(uint64_t seed, std::span<const TensorSpec> manifest) {
  WeightArchive archive;
  for (const TensorSpec& spec : manifest) {
    uint64_t state = seed;
    const uint64_t base = SplitMix64(state);
    const auto* name_bytes = reinterpret_cast<const uint8_t*>(spec.name.data());
    Xoshiro256 rng(base ^ Fnv1a64({name_bytes, spec.name.size()}));
    Tensor t(spec.shape);
    FillTensor(spec, rng, t);
    archive.Set(spec.name, std::move(t));
  }
  return archive;
}

WeightArchive ZeroArchive(std::span<const TensorSpec> manifest) {
  WeightArchive archive;
  for (const TensorSpec& spec : manifest) {
    const bool one = spec.init == Init::kGdnBeta || spec.init == Init::kZScale;
    archive.Set(spec.name, Tensor(spec.shape, one ? 1.0f : 0.0f));
  }
  return archive;
}

std::vector<uint8_t> ReadFileBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorKind::kIo, "cannot open '" + path + "' for reading");
  return std::vector<uint8_t>(std::istreambuf_iterator<char>(in),
                              std::istreambuf_iterator<char>());
}

void WriteFileBytes(const std::string& path, std::span<const uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorKind::kIo, "cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) Fail(ErrorKind::kIo, "failed writing '" + path + "'");
}

}  // namespace mlic
