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

#include "mlic/coder_vectors.h"

#include "mlic/entropy.h"
#include "mlic/error.h"
#include "mlic/range_coder.h"

namespace mlic {
namespace {

const std::vector<uint32_t> kHalf = {32768, 32768};
const std::vector<uint32_t> kCertain = {65536};
const std::vector<uint32_t> kRamp = {512, 1024, 2048, 4096, 8192, 16384, 32768, 512};

std::vector<uint32_t> Peaked() {
  std::vector<uint32_t> f(kCdfBins, 1);
  f[64] = kCdfTotal - (kCdfBins - 1);
  return f;
}

CoderStep Sym(const std::vector<uint32_t>& freqs, int symbol) {
  return {freqs, symbol, 0, 0};
}

CoderStep Raw(int bits, uint32_t value) { return {{}, 0, bits, value}; }

}  // namespace

std::vector<CoderVector> GoldenCoderVectors() {
  std::vector<CoderVector> v;
  v.push_back({"empty", {}, {}});
  v.push_back({"half", {Sym(kHalf, 1)}, {0x80}});
  v.push_back({"certain", {Sym(kCertain, 0)}, {}});

  CoderVector ramp{"ramp", {}, {}};
  for (int i = 0; i < 40; ++i) ramp.steps.push_back(Sym(kRamp, (i * 5) % 8));
  v.push_back(ramp);

  CoderVector peaked{"peaked", {}, {}};
  const std::vector<uint32_t> p = Peaked();
  for (int i = 0; i < 300; ++i) {
    const int s = i % 97 == 13 ? 0 : (i % 131 == 7 ? kEscapeIndex : 64);
    peaked.steps.push_back(Sym(p, s));
  }
  v.push_back(peaked);

  CoderVector bypass{"bypass", {}, {}};
  const uint32_t values[] = {0x8001, 0x0000, 0xFFFF, 0x1234, 0x00FF};
  for (int i = 0; i < 16; ++i) {
    bypass.steps.push_back(Sym(kRamp, i % 8));
    const int bits = 1 + i;
    bypass.steps.push_back(Raw(bits, values[i % 5] & ((1u << bits) - 1)));
  }
  v.push_back(bypass);

  // Cross-checked against tools/coder_oracle.py.
  v[3].expected = {
      0x00, 0x82, 0xb7, 0x77, 0x9a, 0x06, 0x56, 0xee, 0xf3, 0x40,
      0xca, 0xdd, 0xde, 0x68, 0x19, 0x5b, 0xbb, 0xcd, 0x03, 0x2b,
      0x77, 0x7a};
  v[4].expected = {
      0xfe, 0x3e, 0x63, 0xb8, 0x7b, 0x23, 0x68, 0x33, 0xf9, 0xd6,
      0xbf, 0x8a};
  v[5].expected = {
      0x01, 0x02, 0x0c, 0x10, 0x30, 0x2d, 0x41, 0xc0, 0x7f, 0x00,
      0x69, 0xd1, 0xfb, 0x0c, 0xfc, 0x1a, 0xf2, 0x7b, 0xc0, 0xa1,
      0x18, 0xc9, 0x80, 0xfe, 0x01, 0x04};
  return v;
}

std::vector<uint8_t> EncodeCoderVector(const CoderVector& v) {
  RangeEncoder enc;
  for (const CoderStep& s : v.steps) {
    if (s.bypass_bits > 0) {
      enc.EncodeBypass(s.bypass_value, s.bypass_bits);
    } else {
      enc.Encode(CdfTable::FromFrequencies(s.freqs), s.symbol);
    }
  }
  return enc.Finish();
}

bool DecodeCoderVector(const CoderVector& v, std::span<const uint8_t> bytes) {
  try {
    RangeDecoder dec(bytes, v.name);
    for (const CoderStep& s : v.steps) {
      if (s.bypass_bits > 0) {
        if (dec.DecodeBypass(s.bypass_bits) != s.bypass_value) return false;
      } else if (dec.Decode(CdfTable::FromFrequencies(s.freqs)) != s.symbol) {
        return false;
      }
    }
    dec.ExpectEnd();
    return true;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace mlic
