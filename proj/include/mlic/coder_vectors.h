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

// Normative range coder test vectors: integer-only CDFs, so the expected
// bytes do not depend on the platform's libm. The same vectors are stored
// as hex in testdata/coder_vectors.txt.

#ifndef MLIC_CODER_VECTORS_H_
#define MLIC_CODER_VECTORS_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mlic {

// One coding step: either a symbol under `freqs`, or a raw bypass field
// when bypass_bits > 0.
struct CoderStep {
  std::vector<uint32_t> freqs;
  int symbol = 0;
  int bypass_bits = 0;
  uint32_t bypass_value = 0;
};

struct CoderVector {
  std::string name;
  std::vector<CoderStep> steps;
  std::vector<uint8_t> expected;
};

std::vector<CoderVector> GoldenCoderVectors();
std::vector<uint8_t> EncodeCoderVector(const CoderVector& v);
// True when `bytes` decodes back to exactly the vector's steps.
bool DecodeCoderVector(const CoderVector& v, std::span<const uint8_t> bytes);

}  // namespace mlic

#endif  // MLIC_CODER_VECTORS_H_
