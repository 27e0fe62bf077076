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

// Dense float tensors and the handful of inference kernels the codec needs.
//
// Every reduction runs in a fixed order. Parallelism, when enabled, is only
// applied across independent outputs, so the encoder and the decoder compute
// bit-identical floats when they run the same build on the same platform.

#ifndef MLIC_TENSOR_H_
#define MLIC_TENSOR_H_

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace mlic {

using Shape = std::vector<int>;

std::string ShapeString(const Shape& shape);

// Row-major array of floats, rank 1 to 4. Feature maps are (C, H, W),
// linear weights (out, in), conv kernels (out, in, K, K).
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, float fill = 0.0f);
  Tensor(Shape shape, std::vector<float> data);

  static Tensor Zeros(Shape shape) { return Tensor(std::move(shape)); }

  const Shape& shape() const { return shape_; }
  int rank() const { return static_cast<int>(shape_.size()); }
  int dim(int i) const { return shape_[i]; }
  size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  float* data() { return data_.data(); }
  const float* data() const { return data_.data(); }
  std::span<float> span() { return data_; }
  std::span<const float> span() const { return data_; }
  const std::vector<float>& values() const { return data_; }

  float& operator[](size_t i) { return data_[i]; }
  float operator[](size_t i) const { return data_[i]; }

  // (C, H, W) accessors.
  int channels() const { return shape_[0]; }
  int height() const { return shape_[1]; }
  int width() const { return shape_[2]; }
  size_t plane() const { return static_cast<size_t>(shape_[1]) * shape_[2]; }
  float& at(int c, int y, int x) {
    return data_[(static_cast<size_t>(c) * shape_[1] + y) * shape_[2] + x];
  }
  float at(int c, int y, int x) const {
    return data_[(static_cast<size_t>(c) * shape_[1] + y) * shape_[2] + x];
  }
  float* channel(int c) { return data_.data() + c * plane(); }
  const float* channel(int c) const { return data_.data() + c * plane(); }

  // Copy of channels [begin, end) of a (C, H, W) tensor.
  Tensor Channels(int begin, int end) const;

  bool AllFinite() const;

  friend bool operator==(const Tensor& a, const Tensor& b) {
    return a.shape_ == b.shape_ && a.data_ == b.data_;
  }

 private:
  Shape shape_;
  std::vector<float> data_;
};

// Concatenates (C_i, H, W) tensors along channels.
Tensor ConcatChannels(std::span<const Tensor* const> parts);
Tensor ConcatChannels(std::initializer_list<const Tensor*> parts);

// Byte-wise equality of the float payloads (distinguishes -0 and +0).
bool BitIdentical(const Tensor& a, const Tensor& b);

// Queries x keys table of allowed entries.
class AttentionMask {
 public:
  AttentionMask() = default;
  AttentionMask(int queries, int keys, bool allowed = true)
      : queries_(queries),
        keys_(keys),
        allowed_(static_cast<size_t>(queries) * keys, allowed ? 1 : 0) {}

  int queries() const { return queries_; }
  int keys() const { return keys_; }
  bool allowed(int q, int k) const {
    return allowed_[static_cast<size_t>(q) * keys_ + k] != 0;
  }
  void set(int q, int k, bool allowed) {
    allowed_[static_cast<size_t>(q) * keys_ + k] = allowed ? 1 : 0;
  }
  std::span<const uint8_t> row(int q) const {
    return std::span<const uint8_t>(allowed_).subspan(
        static_cast<size_t>(q) * keys_, keys_);
  }

 private:
  int queries_ = 0;
  int keys_ = 0;
  std::vector<uint8_t> allowed_;
};

// out = conv(in, kernel) + bias. kernel is (out_ch, in_ch, K, K); bias is
// empty or (out_ch). Per output the sum runs over kernel row, kernel col,
// input channel in that order.
Tensor Conv2d(const Tensor& input, const Tensor& kernel, int stride,
              int padding);
Tensor Conv2d(const Tensor& input, const Tensor& kernel, const Tensor& bias,
              int stride, int padding);

// Transposed convolution, kernel (in_ch, out_ch, K, K). Output spatial size is
// (H - 1) * stride - 2 * padding + K + output_padding.
Tensor ConvTranspose2d(const Tensor& input, const Tensor& kernel,
                       const Tensor& bias, int stride, int padding,
                       int output_padding);

// Per-position affine map over channels: weight (out, in), bias (out) or
// empty. Input (in, H, W) or (rows, in) for rank 2.
Tensor Linear(const Tensor& input, const Tensor& weight, const Tensor& bias);

// Exact erf form: x * Phi(x).
float Gelu(float x);
Tensor Gelu(const Tensor& input);
void GeluInPlace(Tensor& t);

// Generalized divisive normalization over channels of a (C, H, W) map:
//   forward: out_c = in_c / sqrt(beta_c + sum_k gamma_ck in_k^2)
//   inverse: out_c = in_c * sqrt(...)
Tensor Gdn(const Tensor& input, const Tensor& beta, const Tensor& gamma,
           bool inverse);

// Softmax over the allowed entries of each row. Forbidden entries are set to
// exactly 0 and a row with nothing allowed becomes all zeros.
Tensor MaskedSoftmax(const Tensor& scores, const AttentionMask& mask);
void MaskedSoftmaxRow(std::span<const float> scores,
                      std::span<const uint8_t> allowed, std::span<float> out);

void AddInPlace(Tensor& acc, const Tensor& other);

}  // namespace mlic

#endif  // MLIC_TENSOR_H_
