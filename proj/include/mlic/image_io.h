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

// 8-bit RGB images, binary PPM (P6, maxval 255) I/O, padding and PSNR.

#ifndef MLIC_IMAGE_IO_H_
#define MLIC_IMAGE_IO_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mlic/tensor.h"

namespace mlic {

struct Image8 {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> rgb;  // interleaved, row-major

  friend bool operator==(const Image8&, const Image8&) = default;
};

// Throws kFormat on anything but a P6 file with maxval 255.
Image8 ParsePpm(std::span<const uint8_t> bytes);
std::vector<uint8_t> EncodePpm(const Image8& image);
Image8 ReadPpm(const std::string& path);
void WritePpm(const std::string& path, const Image8& image);

// (3, H, W) in [0, 1].
Tensor ImageToTensor(const Image8& image);
// Clamps to [0, 1] and rounds to the nearest 8-bit level.
Image8 TensorToImage(const Tensor& image);

// Mirror padding (edge sample not repeated) on the bottom and right up to
// the next multiple of `multiple`.
Tensor ReflectPad(const Tensor& image, int multiple);
// Top-left (C, height, width) window.
Tensor Crop(const Tensor& image, int height, int width);

// Over all channels, peak 255; infinity for identical images.
double Psnr(const Image8& a, const Image8& b);

// Deterministic smooth test pattern.
Image8 GradientImage(int width, int height);

}  // namespace mlic

#endif  // MLIC_IMAGE_IO_H_
