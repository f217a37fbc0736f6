/* Copyright 2026 The binloc Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef BINLOC_OPS_HPP_
#define BINLOC_OPS_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "binloc/bitplane.hpp"
#include "binloc/tensor.hpp"

namespace binloc {

struct ConvParams {
  std::size_t kernel_h = 1;
  std::size_t kernel_w = 1;
  std::size_t stride_h = 1;
  std::size_t stride_w = 1;
  std::size_t pad_h = 0;
  std::size_t pad_w = 0;
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;

  /// k x k kernel with "same" padding (k / 2) unless given.
  static ConvParams square(std::size_t in, std::size_t out, std::size_t k, std::size_t stride = 1);
  static ConvParams square(std::size_t in, std::size_t out, std::size_t k, std::size_t stride, std::size_t pad);

  std::size_t filter_size() const { return in_channels * kernel_h * kernel_w; }
  std::size_t weight_count() const { return out_channels * filter_size(); }
  Shape4 weight_shape() const { return {out_channels, in_channels, kernel_h, kernel_w}; }

  /// floor((h + 2p - k) / s) + 1; throws ShapeError when that is < 1.
  std::size_t out_h(std::size_t h) const;
  std::size_t out_w(std::size_t w) const;
  Shape4 output_shape(const Shape4& input) const;

  friend bool operator==(const ConvParams&, const ConvParams&) = default;
};

enum class BatchNormMode { kTrain, kEval };

template <typename T>
struct BatchNormParams {
  std::vector<T> gamma;
  std::vector<T> beta;
  std::vector<T> running_mean;
  std::vector<T> running_var;
  T epsilon = T(1e-5);
  T momentum = T(0.1);

  BatchNormParams() = default;
  explicit BatchNormParams(std::size_t channels)
      : gamma(channels, T(1)), beta(channels, T(0)), running_mean(channels, T(0)), running_var(channels, T(1)) {}
  std::size_t channels() const { return gamma.size(); }
};

/// Per-call state a train-mode batchnorm needs for its backward pass.
template <typename T>
struct BatchNormCache {
  std::vector<T> mean;
  std::vector<T> inv_std;
  Tensor<T> x_hat;
  bool batch_stats = true;
};

// Convolution -------------------------------------------------------------

/// Lowers a batch to a (n * oh * ow) x (ci * kh * kw) matrix, one row per
/// output position, columns in (c, dy, dx) order. Out-of-image taps read
/// `pad_value`.
template <typename T>
Matrix<T> im2col(const Tensor<T>& x, const ConvParams& p, T pad_value = T(0));

/// Scatter-adds lowered rows back into an image-shaped gradient.
template <typename T>
Tensor<T> col2im(const Matrix<T>& cols, const ConvParams& p, const Shape4& input_shape);

/// Cross-correlation of x (n, ci, h, w) with w (co, ci, kh, kw). Padding
/// reads `pad_value`: 0 for real layers, -1 when mirroring the binary path.
template <typename T>
Tensor<T> conv2d_dense(const Tensor<T>& x, const Tensor<T>& w, const ConvParams& p, T pad_value = T(0));

/// Gradients of conv2d_dense. Either output pointer may be null.
template <typename T>
void conv2d_dense_backward(const Tensor<T>& x, const Tensor<T>& w, const ConvParams& p, const Tensor<T>& grad_out,
                           T pad_value, Tensor<T>* grad_x, Tensor<T>* grad_w);

/// Bit-level im2col: one row of ci*kh*kw sign bits per output position.
/// Padding taps are -1, i.e. zero bits.
BitMatrix bit_im2col(const BitActivations& x, const ConvParams& p);

/// XNOR/popcount convolution: out[o] = alpha[o] * (+-1 cross-correlation).
/// The integer accumulation is exact; alpha is applied with one multiply.
/// With `scale_map` (n, 1, oh, ow) each position is further multiplied by
/// its activation scaling factor.
template <typename T = float>
Tensor<T> conv2d_binary(const BitActivations& x, const BitPlaneTensor& w, const ConvParams& p,
                        const Tensor<T>* scale_map = nullptr);

/// Per-position scaling factor for binarized activations: the
/// channel-mean of |x| box-filtered over the kernel window.
template <typename T>
Tensor<T> activation_scale_map(const Tensor<T>& x, const ConvParams& p);

// Pooling -----------------------------------------------------------------

enum class PoolKind { kMax, kAvg };

/// Window/stride pooling with floor behaviour on odd sizes. `argmax`, when
/// given, receives the flat input index picked by each max-pool output.
template <typename T>
Tensor<T> pool2d(const Tensor<T>& x, PoolKind kind, std::size_t window = 2, std::size_t stride = 2,
                 std::vector<std::uint32_t>* argmax = nullptr);

template <typename T>
Tensor<T> pool2d_backward(const Tensor<T>& grad_out, const Shape4& input_shape, PoolKind kind, std::size_t window,
                          std::size_t stride, const std::vector<std::uint32_t>& argmax);

template <typename T>
Tensor<T> maxpool2d(const Tensor<T>& x) {
  return pool2d(x, PoolKind::kMax);
}
template <typename T>
Tensor<T> avgpool2d(const Tensor<T>& x) {
  return pool2d(x, PoolKind::kAvg);
}

// Normalization and activations -------------------------------------------

/// Train mode normalizes with batch statistics and updates the running
/// averages with `momentum`; eval mode uses the running statistics.
template <typename T>
Tensor<T> batchnorm(const Tensor<T>& x, BatchNormParams<T>& bn, BatchNormMode mode, BatchNormCache<T>* cache = nullptr);

template <typename T>
Tensor<T> batchnorm_backward(const Tensor<T>& grad_out, const BatchNormParams<T>& bn, const BatchNormCache<T>& cache,
                             std::vector<T>* grad_gamma, std::vector<T>* grad_beta);

/// sign with sign(0) = +1.
template <typename T>
Tensor<T> sign_act(const Tensor<T>& x);

/// Straight-through estimator: upstream gradient where |x| <= 1, else 0.
template <typename T>
Tensor<T> sign_backward(const Tensor<T>& grad_out, const Tensor<T>& x);

template <typename T>
Tensor<T> relu(const Tensor<T>& x);

template <typename T>
Tensor<T> relu_backward(const Tensor<T>& grad_out, const Tensor<T>& x);

template <typename T>
Tensor<T> upsample_nearest(const Tensor<T>& x, std::size_t factor = 2);

template <typename T>
Tensor<T> upsample_nearest_backward(const Tensor<T>& grad_out, std::size_t factor = 2);

template <typename T>
Tensor<T> concat_channels(const std::vector<const Tensor<T>*>& xs);

/// Splits a concat gradient back into per-input pieces of the given widths.
template <typename T>
std::vector<Tensor<T>> split_channels(const Tensor<T>& x, const std::vector<std::size_t>& channels);

template <typename T>
Tensor<T> add(const Tensor<T>& x, const Tensor<T>& y);

/// x += y.
template <typename T>
void add_inplace(Tensor<T>& x, const Tensor<T>& y);

}  // namespace binloc

#endif  // BINLOC_OPS_HPP_
