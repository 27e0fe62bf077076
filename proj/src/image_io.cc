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

#include "mlic/image_io.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

#include "mlic/bytes.h"
#include "mlic/error.h"

namespace mlic {
namespace {

constexpr int kMaxDimension = 1 << 16;

class PpmTokenizer {
 public:
  explicit PpmTokenizer(std::span<const uint8_t> b) : b_(b) {}

  std::string Token() {
    SkipSpaceAndComments();
    std::string t;
    while (pos_ < b_.size() && !std::isspace(b_[pos_])) t.push_back(static_cast<char>(b_[pos_++]));
    if (t.empty()) Fail(ErrorKind::kFormat, "ppm: truncated header");
    return t;
  }

  int Number() {
    const std::string t = Token();
    if (t.size() > 6 || !std::all_of(t.begin(), t.end(), ::isdigit)) {
      Fail(ErrorKind::kFormat, "ppm: bad header field '" + t + "'");
    }
    return std::stoi(t);
  }

  // Exactly one whitespace byte separates maxval from the raster.
  size_t RasterStart() {
    if (pos_ >= b_.size() || !std::isspace(b_[pos_])) {
      Fail(ErrorKind::kFormat, "ppm: missing separator before raster");
    }
    return pos_ + 1;
  }

 private:
  void SkipSpaceAndComments() {
    while (pos_ < b_.size()) {
      if (std::isspace(b_[pos_])) {
        ++pos_;
      } else if (b_[pos_] == '#') {
        while (pos_ < b_.size() && b_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const uint8_t> b_;
  size_t pos_ = 0;
};

// Mirror index into [0, n) without repeating the edge sample.
int Reflect(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

}  // namespace

Image8 ParsePpm(std::span<const uint8_t> bytes) {
  PpmTokenizer tok(bytes);
  if (tok.Token() != "P6") Fail(ErrorKind::kFormat, "ppm: only binary P6 is supported");
  Image8 img;
  img.width = tok.Number();
  img.height = tok.Number();
  const int maxval = tok.Number();
  if (img.width < 1 || img.height < 1 || img.width > kMaxDimension ||
      img.height > kMaxDimension) {
    Fail(ErrorKind::kFormat, "ppm: unsupported dimensions " + std::to_string(img.width) +
                                 "x" + std::to_string(img.height));
  }
  if (maxval != 255) Fail(ErrorKind::kFormat, "ppm: maxval must be 255");
  const size_t start = tok.RasterStart();
  const size_t n = static_cast<size_t>(img.width) * img.height * 3;
  if (bytes.size() - std::min(start, bytes.size()) < n) {
    Fail(ErrorKind::kFormat, "ppm: raster truncated");
  }
  img.rgb.assign(bytes.begin() + start, bytes.begin() + start + n);
  return img;
}

std::vector<uint8_t> EncodePpm(const Image8& image) {
  Check(image.rgb.size() == static_cast<size_t>(image.width) * image.height * 3,
        ErrorKind::kShape, "ppm: pixel buffer does not match dimensions");
  ByteWriter w;
  w.Text("P6\n" + std::to_string(image.width) + " " + std::to_string(image.height) +
         "\n255\n");
  w.Bytes(image.rgb);
  return w.Take();
}

Image8 ReadPpm(const std::string& path) { return ParsePpm(ReadFileBytes(path)); }

void WritePpm(const std::string& path, const Image8& image) {
  WriteFileBytes(path, EncodePpm(image));
}

Tensor ImageToTensor(const Image8& image) {
  Tensor t({3, image.height, image.width});
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      for (int c = 0; c < 3; ++c) {
        t.at(c, y, x) =
            image.rgb[(static_cast<size_t>(y) * image.width + x) * 3 + c] / 255.0f;
      }
    }
  }
  return t;
}

Image8 TensorToImage(const Tensor& image) {
  Check(image.rank() == 3 && image.channels() == 3, ErrorKind::kShape,
        "TensorToImage: expected (3, H, W), got " + ShapeString(image.shape()));
  Image8 img;
  img.width = image.width();
  img.height = image.height();
  img.rgb.resize(static_cast<size_t>(img.width) * img.height * 3);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      for (int c = 0; c < 3; ++c) {
        const float v = std::clamp(image.at(c, y, x), 0.0f, 1.0f);
        img.rgb[(static_cast<size_t>(y) * img.width + x) * 3 + c] =
            static_cast<uint8_t>(std::lround(v * 255.0f));
      }
    }
  }
  return img;
}

Tensor ReflectPad(const Tensor& image, int multiple) {
  Check(image.rank() == 3 && multiple >= 1, ErrorKind::kShape,
        "ReflectPad: expected (C, H, W)");
  const int h = image.height();
  const int w = image.width();
  const int ph = (h + multiple - 1) / multiple * multiple;
  const int pw = (w + multiple - 1) / multiple * multiple;
  if (ph == h && pw == w) return image;
  Tensor out({image.channels(), ph, pw});
  for (int c = 0; c < image.channels(); ++c) {
    for (int y = 0; y < ph; ++y) {
      const int sy = Reflect(y, h);
      for (int x = 0; x < pw; ++x) out.at(c, y, x) = image.at(c, sy, Reflect(x, w));
    }
  }
  return out;
}

Tensor Crop(const Tensor& image, int height, int width) {
  Check(image.rank() == 3 && height <= image.height() && width <= image.width(),
        ErrorKind::kShape, "Crop: window exceeds the image");
  Tensor out({image.channels(), height, width});
  for (int c = 0; c < image.channels(); ++c) {
    for (int y = 0; y < height; ++y) {
      std::copy_n(image.channel(c) + static_cast<size_t>(y) * image.width(), width,
                  &out.at(c, y, 0));
    }
  }
  return out;
}

double Psnr(const Image8& a, const Image8& b) {
  Check(a.width == b.width && a.height == b.height && a.rgb.size() == b.rgb.size(),
        ErrorKind::kShape, "Psnr: image dimensions differ");
  double sse = 0.0;
  for (size_t i = 0; i < a.rgb.size(); ++i) {
    const double d = static_cast<double>(a.rgb[i]) - b.rgb[i];
    sse += d * d;
  }
  if (sse == 0.0) return std::numeric_limits<double>::infinity();
  const double mse = sse / static_cast<double>(a.rgb.size());
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

Image8 GradientImage(int width, int height) {
  Image8 img;
  img.width = width;
  img.height = height;
  img.rgb.resize(static_cast<size_t>(width) * height * 3);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      uint8_t* p = &img.rgb[(static_cast<size_t>(y) * width + x) * 3];
      p[0] = static_cast<uint8_t>(255 * x / std::max(1, width - 1));
      p[1] = static_cast<uint8_t>(255 * y / std::max(1, height - 1));
      p[2] = static_cast<uint8_t>((x + y) * 255 / std::max(1, width + height - 2));
    }
  }
  return img;
}

}  // namespace mlic
