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

// Rough timings of the heavy stages, used to size the test corpus.

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "mlic/codec.h"
#include "mlic/image_io.h"

int main(int argc, char** argv) {
  using Clock = std::chrono::steady_clock;
  const int n = argc > 1 ? std::atoi(argv[1]) : 192;
  const bool plus = argc > 2 && argv[2][0] == '+';
  const int size = argc > 3 ? std::atoi(argv[3]) : 64;
  mlic::ModelConfig c = plus ? mlic::ModelConfig::MlicPlus() : mlic::ModelConfig::Mlic();
  c.transform.n_channels = n;
  auto t0 = Clock::now();
  const mlic::WeightArchive w = mlic::SeedModelArchive(7, c);
  const mlic::Codec codec(c, w);
  auto t1 = Clock::now();
  const mlic::Tensor x = mlic::ImageToTensor(mlic::GradientImage(size, size));
  const mlic::EncodeResult e = codec.Encode(x, true);
  auto t2 = Clock::now();
  const mlic::DecodeResult d = codec.Decode(e.bytes);
  auto t3 = Clock::now();
  auto ms = [](auto a, auto b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
  };
  double ymax = 0;
  for (float v : e.trace.y_hat.span()) ymax = std::max<double>(ymax, std::abs(v));
  std::printf("N=%d M=%d %dx%d: setup %.0f ms, encode+recon %.0f ms, decode %.0f ms\n", n,
              c.transform.m_channels, size, size, ms(t0, t1), ms(t1, t2), ms(t2, t3));
  std::printf("bytes %zu est_bits %.1f payload_bits %zu max|y| %.2f exact %d\n",
              e.bytes.size(), e.trace.estimate.total_bits, 8 * e.container.payload_bytes(),
              ymax, int(mlic::BitIdentical(e.trace.y_hat, d.trace.y_hat)));
  return 0;
}
