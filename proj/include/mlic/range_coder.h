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

// Carry-propagating range coder over 16-bit CDFs (cache + pending 0xFF
// run, as in LZMA's rc). Output is big-endian.
//
// Stream conventions:
//   * low is 33 bits wide, range 32 bits starting at 0xFFFFFFFF; both sides
//     renormalize a byte at a time while range < 2^24.
//   * the leading byte the carry scheme always emits as zero is dropped;
//     the decoder primes its code register from the first four bytes.
//   * Finish() picks the value in [low, low + range) with the most trailing
//     zero bits, and drops up to four trailing zero bytes it produced.
//     The decoder reads missing bytes as zero and reports truncation once it
//     needs more than four bytes past the end.
//   * a stream with no symbols is empty.

#ifndef MLIC_RANGE_CODER_H_
#define MLIC_RANGE_CODER_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mlic/entropy.h"

namespace mlic {

class RangeEncoder {
 public:
  // Codes the interval [low, low + freq) of a 2^16 total.
  void Encode(uint32_t low, uint32_t freq);
  void Encode(const CdfTable& cdf, int index) {
    Encode(cdf.low(index), cdf.freq(index));
  }
  // Raw field of `bits` (1..16) bits.
  void EncodeBypass(uint32_t value, int bits);

  // Escaped offsets carry their value as a 16-bit two's complement field.
  void EncodeOffset(const CdfTable& cdf, int32_t k);

  size_t symbols() const { return symbols_; }
  std::vector<uint8_t> Finish();

 private:
  void ShiftLow();
  void Normalize();

  uint64_t low_ = 0;
  uint32_t range_ = 0xFFFFFFFFu;
  uint8_t cache_ = 0;
  uint64_t cache_size_ = 1;
  bool drop_first_ = true;
  size_t symbols_ = 0;
  std::vector<uint8_t> out_;
};

class RangeDecoder {
 public:
  static constexpr int kMaxOverread = 4;

  // `label` names the stream in error messages.
  explicit RangeDecoder(std::span<const uint8_t> bytes, std::string label = "stream");

  int Decode(const CdfTable& cdf);
  uint32_t DecodeBypass(int bits);
  int32_t DecodeOffset(const CdfTable& cdf);

  // Throws kDecodeIntegrity when bytes remain that no symbol consumed.
  void ExpectEnd() const;

 private:
  void Prime();
  uint8_t NextByte();
  void Normalize();

  std::span<const uint8_t> bytes_;
  std::string label_;
  size_t pos_ = 0;
  bool primed_ = false;
  uint32_t code_ = 0;
  uint32_t range_ = 0xFFFFFFFFu;
};

// Ideal code length of `index` under `cdf`: -log2(freq / 2^16).
double TableBits(const CdfTable& cdf, int index);

}  // namespace mlic

#endif  // MLIC_RANGE_CODER_H_
