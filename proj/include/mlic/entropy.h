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

// Quantization, the Gaussian mean-scale symbol model, rate accounting and
// integer CDF construction for the range coder.
//
// The coder works on integer offsets k = round(y - mu); the reconstruction
// is k + mu. Each symbol has its own table over the support [-64, 63] plus
// one escape bin; escaped offsets follow as a 16-bit two's complement
// bypass field.

#ifndef MLIC_ENTROPY_H_
#define MLIC_ENTROPY_H_

#include <cstdint>
#include <span>
#include <vector>

#include "mlic/tensor.h"
#include "mlic/weight_archive.h"

namespace mlic {

constexpr int kCdfPrecisionBits = 16;
constexpr uint32_t kCdfTotal = 1u << kCdfPrecisionBits;
constexpr int kSupportMin = -64;
constexpr int kSupportMax = 63;
constexpr int kSupportSize = kSupportMax - kSupportMin + 1;
constexpr int kEscapeIndex = kSupportSize;
constexpr int kCdfBins = kSupportSize + 1;
constexpr int kEscapeBits = 16;
// Every bin carries at least one count, so the bins other than the mode
// hold at least kCdfBins - 1 = 2^7 counts, i.e. 2^-9 of the total.
constexpr int kTailMassLog2 = 9;
constexpr float kSigmaMin = 0.11f;
constexpr double kProbabilityFloor = 1.0 / 65536.0;

struct GaussianParams {
  Tensor mu;
  Tensor sigma;
};

// Round half away from zero, saturated to the int16 range.
int32_t QuantizeOffset(float y, float mu);
inline float Dequantize(int32_t k, float mu) { return static_cast<float>(k) + mu; }
std::vector<int32_t> Quantize(const Tensor& y, const Tensor& mu);

// Probability of the bin [k - 0.5, k + 0.5) under N(mu_frac, sigma).
double GaussianBinMass(int k, double mu_frac, double sigma);
// -log2 of the bin mass, floored at 2^-16 before the log.
double SymbolBits(int k, double mu_frac, double sigma);

// Cumulative integer table, cdf[0] = 0, cdf[bins] = 2^16, every bin >= 1.
class CdfTable {
 public:
  CdfTable() = default;
  // Throws kDecodeIntegrity unless the frequencies are positive and sum to
  // 2^16.
  static CdfTable FromFrequencies(std::span<const uint32_t> freqs);

  int bins() const { return static_cast<int>(cdf_.size()) - 1; }
  uint32_t low(int index) const { return cdf_[index]; }
  uint32_t freq(int index) const { return cdf_[index + 1] - cdf_[index]; }
  const std::vector<uint32_t>& cdf() const { return cdf_; }
  // Bin whose range contains `count` (count < 2^16).
  int Find(uint32_t count) const;

 private:
  std::vector<uint32_t> cdf_;
};

// Table over [kSupportMin, kSupportMax] plus the escape bin.
CdfTable BuildCdf(double mu_frac, double sigma);

inline bool InSupport(int32_t k) { return k >= kSupportMin && k <= kSupportMax; }
inline int SymbolIndex(int32_t k) {
  return InSupport(k) ? k - kSupportMin : kEscapeIndex;
}

struct RateReport {
  double bits_z = 0.0;
  std::vector<double> bits_anchor;     // per slice
  std::vector<double> bits_nonanchor;  // per slice
  double total_bits = 0.0;
  double bpp = 0.0;
  int64_t pixels = 0;

  // Recomputes total_bits and bpp from the parts.
  void Finalize(int64_t image_pixels);
};

// Static per-channel Gaussian for the hyper latent z. Reads z_model.mu and
// z_model.sigma, each (N); throws kManifest when either is missing.
class ZModel {
 public:
  ZModel(const WeightArchive& weights, int channels);

  int channels() const { return static_cast<int>(mu_.size()); }
  float mu(int c) const { return mu_[c]; }
  float sigma(int c) const { return sigma_[c]; }
  const CdfTable& cdf(int c) const { return tables_[c]; }

  // Offsets round(z - mu_c) for a (N, h, w) tensor; throws kShape for an
  // empty or mis-shaped z.
  std::vector<int32_t> Quantize(const Tensor& z) const;
  Tensor Dequantize(std::span<const int32_t> offsets, int height, int width) const;
  double Bits(std::span<const int32_t> offsets, int height, int width) const;

 private:
  std::vector<float> mu_;
  std::vector<float> sigma_;
  std::vector<CdfTable> tables_;
};

void AppendZModelManifest(int n_channels, std::vector<TensorSpec>* manifest);

}  // namespace mlic

#endif  // MLIC_ENTROPY_H_
