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

#include "mlic/entropy.h"

#include <algorithm>
#include <cmath>

#include "mlic/error.h"

namespace mlic {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

// Mass of N(0, 1) on [a, b), evaluated on the side of zero that keeps the
// erfc arguments positive so tail bins stay accurate.
double StandardMass(double a, double b) {
  if (a >= 0.0) return 0.5 * (std::erfc(a * kInvSqrt2) - std::erfc(b * kInvSqrt2));
  if (b <= 0.0) return 0.5 * (std::erfc(-b * kInvSqrt2) - std::erfc(-a * kInvSqrt2));
  return 1.0 - 0.5 * std::erfc(-a * kInvSqrt2) - 0.5 * std::erfc(b * kInvSqrt2);
}

double UpperTail(double a) { return 0.5 * std::erfc(a * kInvSqrt2); }

}  // namespace

int32_t QuantizeOffset(float y, float mu) {
  const float r = std::round(y - mu);
  if (!(r >= -32768.0f)) return -32768;  // also catches NaN
  if (r > 32767.0f) return 32767;
  return static_cast<int32_t>(r);
}

std::vector<int32_t> Quantize(const Tensor& y, const Tensor& mu) {
  Check(y.shape() == mu.shape(), ErrorKind::kShape,
        "Quantize: y " + ShapeString(y.shape()) + " vs mu " +
            ShapeString(mu.shape()));
  std::vector<int32_t> k(y.size());
  for (size_t i = 0; i < y.size(); ++i) k[i] = QuantizeOffset(y[i], mu[i]);
  return k;
}

double GaussianBinMass(int k, double mu_frac, double sigma) {
  const double a = (k - 0.5 - mu_frac) / sigma;
  const double b = (k + 0.5 - mu_frac) / sigma;
  return StandardMass(a, b);
}

double SymbolBits(int k, double mu_frac, double sigma) {
  const double p = GaussianBinMass(k, mu_frac, sigma);
  return -std::log2(std::max(p, kProbabilityFloor));
}

CdfTable CdfTable::FromFrequencies(std::span<const uint32_t> freqs) {
  Check(!freqs.empty(), ErrorKind::kDecodeIntegrity, "CDF: no bins");
  CdfTable t;
  t.cdf_.resize(freqs.size() + 1);
  uint64_t acc = 0;
  for (size_t i = 0; i < freqs.size(); ++i) {
    if (freqs[i] == 0) {
      Fail(ErrorKind::kDecodeIntegrity,
           "CDF: bin " + std::to_string(i) + " has zero width");
    }
    t.cdf_[i] = static_cast<uint32_t>(acc);
    acc += freqs[i];
  }
  if (acc != kCdfTotal) {
    Fail(ErrorKind::kDecodeIntegrity,
         "CDF: frequencies sum to " + std::to_string(acc) + ", expected 65536");
  }
  t.cdf_.back() = kCdfTotal;
  return t;
}

int CdfTable::Find(uint32_t count) const {
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), count);
  return static_cast<int>(it - cdf_.begin()) - 1;
}

CdfTable BuildCdf(double mu_frac, double sigma) {
  // Each bin: one floor count plus its share of the remaining budget; the
  // rounding remainder goes to the most probable bin.
  constexpr uint32_t kBudget = kCdfTotal - kCdfBins;
  uint32_t freqs[kCdfBins];
  std::fill(std::begin(freqs), std::end(freqs), 1u);

  const int center = std::clamp(static_cast<int>(std::lround(mu_frac)),
                                kSupportMin, kSupportMax);
  auto fill = [&](int k) {
    const double p = GaussianBinMass(k, mu_frac, sigma);
    const uint32_t share = static_cast<uint32_t>(std::floor(p * kBudget));
    freqs[k - kSupportMin] += share;
    return share;
  };
  // Bin masses fall monotonically away from the mode; stop once a share
  // rounds to zero.
  fill(center);
  for (int k = center + 1; k <= kSupportMax && fill(k) > 0; ++k) {
  }
  for (int k = center - 1; k >= kSupportMin && fill(k) > 0; --k) {
  }
  const double escape_mass =
      UpperTail((mu_frac - (kSupportMin - 0.5)) / sigma) +
      UpperTail((kSupportMax + 0.5 - mu_frac) / sigma);
  freqs[kEscapeIndex] += static_cast<uint32_t>(std::floor(escape_mass * kBudget));

  uint32_t sum = 0;
  int mode = 0;
  for (int i = 0; i < kCdfBins; ++i) {
    sum += freqs[i];
    if (freqs[i] > freqs[mode]) mode = i;
  }
  freqs[mode] += kCdfTotal - sum;
  return CdfTable::FromFrequencies(freqs);
}

void RateReport::Finalize(int64_t image_pixels) {
  pixels = image_pixels;
  total_bits = bits_z;
  for (size_t i = 0; i < bits_anchor.size(); ++i) {
    total_bits += bits_anchor[i] + bits_nonanchor[i];
  }
  bpp = image_pixels > 0 ? total_bits / static_cast<double>(image_pixels) : 0.0;
}

ZModel::ZModel(const WeightArchive& weights, int channels) {
  const Tensor& mu = weights.Get("z_model.mu");
  const Tensor& sigma = weights.Get("z_model.sigma");
  if (mu.shape() != Shape{channels} || sigma.shape() != Shape{channels}) {
    Fail(ErrorKind::kManifest, "z model tensors must have shape (" +
                                   std::to_string(channels) + ")");
  }
  mu_.assign(mu.span().begin(), mu.span().end());
  sigma_.resize(channels);
  tables_.reserve(channels);
  for (int c = 0; c < channels; ++c) {
    sigma_[c] = std::max(sigma[c], kSigmaMin);
    tables_.push_back(BuildCdf(0.0, sigma_[c]));
  }
}

std::vector<int32_t> ZModel::Quantize(const Tensor& z) const {
  if (z.rank() != 3 || z.channels() != channels() || z.height() < 1 ||
      z.width() < 1) {
    Fail(ErrorKind::kShape, "z must be (" + std::to_string(channels()) +
                                ", h >= 1, w >= 1), got " +
                                ShapeString(z.shape()));
  }
  std::vector<int32_t> k(z.size());
  const size_t plane = z.plane();
  for (int c = 0; c < channels(); ++c) {
    for (size_t p = 0; p < plane; ++p) {
      k[c * plane + p] = QuantizeOffset(z[c * plane + p], mu_[c]);
    }
  }
  return k;
}

Tensor ZModel::Dequantize(std::span<const int32_t> offsets, int height,
                          int width) const {
  Tensor z({channels(), height, width});
  Check(offsets.size() == z.size(), ErrorKind::kShape,
        "ZModel::Dequantize: offset count mismatch");
  const size_t plane = z.plane();
  for (int c = 0; c < channels(); ++c) {
    for (size_t p = 0; p < plane; ++p) {
      z[c * plane + p] = mlic::Dequantize(offsets[c * plane + p], mu_[c]);
    }
  }
  return z;
}

double ZModel::Bits(std::span<const int32_t> offsets, int height,
                    int width) const {
  const size_t plane = static_cast<size_t>(height) * width;
  Check(offsets.size() == plane * channels() && plane > 0, ErrorKind::kShape,
        "ZModel::Bits: offset count mismatch");
  double bits = 0.0;
  for (int c = 0; c < channels(); ++c) {
    for (size_t p = 0; p < plane; ++p) {
      bits += SymbolBits(offsets[c * plane + p], 0.0, sigma_[c]);
    }
  }
  return bits;
}

void AppendZModelManifest(int n_channels, std::vector<TensorSpec>* manifest) {
  manifest->push_back({"z_model.mu", {n_channels}, Init::kZMean, 1, 1.0f});
  manifest->push_back({"z_model.sigma", {n_channels}, Init::kZScale, 1, 1.0f});
}

}  // namespace mlic
