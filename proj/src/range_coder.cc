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

#include "mlic/range_coder.h"

#include <cmath>

#include "mlic/error.h"

namespace mlic {
namespace {

constexpr uint32_t kTop = 1u << 24;

}  // namespace

void RangeEncoder::ShiftLow() {
  if (static_cast<uint32_t>(low_) < 0xFF000000u || (low_ >> 32) != 0) {
    const uint8_t carry = static_cast<uint8_t>(low_ >> 32);
    uint8_t temp = cache_;
    do {
      if (drop_first_) {
        drop_first_ = false;  // always zero; see header
      } else {
        out_.push_back(static_cast<uint8_t>(temp + carry));
      }
      temp = 0xFF;
    } while (--cache_size_ != 0);
    cache_ = static_cast<uint8_t>(low_ >> 24);
  }
  ++cache_size_;
  low_ = (low_ & 0x00FFFFFFu) << 8;
}

void RangeEncoder::Normalize() {
  while (range_ < kTop) {
    range_ <<= 8;
    ShiftLow();
  }
}

void RangeEncoder::Encode(uint32_t low, uint32_t freq) {
  if (freq == 0 || low + freq > kCdfTotal) {
    Fail(ErrorKind::kDecodeIntegrity, "range coder: invalid interval [" +
                                          std::to_string(low) + ", +" +
                                          std::to_string(freq) + ")");
  }
  const uint32_t r = range_ >> kCdfPrecisionBits;
  low_ += static_cast<uint64_t>(r) * low;
  range_ = r * freq;
  ++symbols_;
  Normalize();
}

void RangeEncoder::EncodeBypass(uint32_t value, int bits) {
  Check(bits >= 1 && bits <= 16, ErrorKind::kUsage, "bypass width must be 1..16");
  Check(value < (1u << bits), ErrorKind::kUsage, "bypass value out of range");
  const uint32_t r = range_ >> bits;
  low_ += static_cast<uint64_t>(r) * value;
  range_ = r;
  ++symbols_;
  Normalize();
}

void RangeEncoder::EncodeOffset(const CdfTable& cdf, int32_t k) {
  const int index = SymbolIndex(k);
  Encode(cdf, index);
  if (index == kEscapeIndex) {
    EncodeBypass(static_cast<uint16_t>(static_cast<int16_t>(k)), kEscapeBits);
  }
}

std::vector<uint8_t> RangeEncoder::Finish() {
  if (symbols_ == 0) return {};
  // Largest power-of-two alignment that still lands inside the interval.
  const uint64_t hi = low_ + range_;
  for (int b = 32; b >= 0; --b) {
    const uint64_t mask = (uint64_t{1} << b) - 1;
    const uint64_t v = (low_ + mask) & ~mask;
    if (v < hi) {
      low_ = v;
      break;
    }
  }
  const size_t before = out_.size();
  for (int i = 0; i < 5; ++i) ShiftLow();
  size_t trimmed = 0;
  while (out_.size() > before && trimmed < RangeDecoder::kMaxOverread &&
         out_.back() == 0) {
    out_.pop_back();
    ++trimmed;
  }
  std::vector<uint8_t> out = std::move(out_);
  *this = RangeEncoder();
  return out;
}

RangeDecoder::RangeDecoder(std::span<const uint8_t> bytes, std::string label)
    : bytes_(bytes), label_(std::move(label)) {}

uint8_t RangeDecoder::NextByte() {
  if (pos_ >= bytes_.size() + kMaxOverread) {
    Fail(ErrorKind::kDecodeIntegrity,
         label_ + ": truncated (read past byte " + std::to_string(bytes_.size()) + ")");
  }
  return pos_ < bytes_.size() ? bytes_[pos_++] : (++pos_, 0);
}

void RangeDecoder::Prime() {
  for (int i = 0; i < 4; ++i) code_ = (code_ << 8) | NextByte();
  primed_ = true;
}

void RangeDecoder::Normalize() {
  while (range_ < kTop) {
    code_ = (code_ << 8) | NextByte();
    range_ <<= 8;
  }
}

int RangeDecoder::Decode(const CdfTable& cdf) {
  if (!primed_) Prime();
  const uint32_t r = range_ >> kCdfPrecisionBits;
  const uint32_t count = code_ / r;
  if (count >= kCdfTotal) {
    Fail(ErrorKind::kDecodeIntegrity, label_ + ": code value outside the coded interval");
  }
  const int index = cdf.Find(count);
  code_ -= r * cdf.low(index);
  range_ = r * cdf.freq(index);
  Normalize();
  return index;
}

uint32_t RangeDecoder::DecodeBypass(int bits) {
  Check(bits >= 1 && bits <= 16, ErrorKind::kUsage, "bypass width must be 1..16");
  if (!primed_) Prime();
  const uint32_t r = range_ >> bits;
  const uint32_t value = code_ / r;
  if (value >= (1u << bits)) {
    Fail(ErrorKind::kDecodeIntegrity, label_ + ": bypass field out of range");
  }
  code_ -= r * value;
  range_ = r;
  Normalize();
  return value;
}

int32_t RangeDecoder::DecodeOffset(const CdfTable& cdf) {
  const int index = Decode(cdf);
  if (index != kEscapeIndex) return index + kSupportMin;
  return static_cast<int16_t>(static_cast<uint16_t>(DecodeBypass(kEscapeBits)));
}

void RangeDecoder::ExpectEnd() const {
  if (pos_ < bytes_.size()) {
    Fail(ErrorKind::kDecodeIntegrity,
         label_ + ": " + std::to_string(bytes_.size() - pos_) +
             " trailing bytes after the last symbol");
  }
}

double TableBits(const CdfTable& cdf, int index) {
  return kCdfPrecisionBits - std::log2(static_cast<double>(cdf.freq(index)));
}

}  // namespace mlic
