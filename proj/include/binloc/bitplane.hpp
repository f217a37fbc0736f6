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

#ifndef BINLOC_BITPLANE_HPP_
#define BINLOC_BITPLANE_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "binloc/tensor.hpp"

namespace binloc {

using Word = std::uint64_t;
inline constexpr std::size_t kWordBits = 64;

constexpr std::size_t words_for_bits(std::size_t bits) { return (bits + kWordBits - 1) / kWordBits; }

/// Rows of sign bits, each row packed LSB-first into whole words. Bits past
/// `bits_per_row` in the final word of a row are always zero, so a row-pair
/// XOR over whole words never counts padding.
struct BitMatrix {
  std::size_t rows = 0;
  std::size_t bits_per_row = 0;
  std::size_t words_per_row = 0;
  std::vector<Word> words;

  BitMatrix() = default;
  BitMatrix(std::size_t r, std::size_t bits)
      : rows(r), bits_per_row(bits), words_per_row(words_for_bits(bits)), words(r * words_for_bits(bits), 0) {}

  std::span<Word> row(std::size_t r) { return {words.data() + r * words_per_row, words_per_row}; }
  std::span<const Word> row(std::size_t r) const { return {words.data() + r * words_per_row, words_per_row}; }

  bool get(std::size_t r, std::size_t i) const {
    return (words[r * words_per_row + i / kWordBits] >> (i % kWordBits)) & 1u;
  }
  void set(std::size_t r, std::size_t i) { words[r * words_per_row + i / kWordBits] |= Word{1} << (i % kWordBits); }

  /// True when every padding bit is zero.
  bool padding_clear() const;

  friend bool operator==(const BitMatrix&, const BitMatrix&) = default;
};

/// Sign-bit weights of shape (co, ci, kh, kw) with one scaling factor per
/// output channel. Bit 1 encodes +1 and bit 0 encodes -1; row i of `bits` is
/// filter i flattened in (ci, kh, kw) order.
struct BitPlaneTensor {
  Shape4 logical_shape;
  BitMatrix bits;
  std::vector<float> alphas;

  std::size_t filter_size() const { return logical_shape.c * logical_shape.h * logical_shape.w; }
  friend bool operator==(const BitPlaneTensor&, const BitPlaneTensor&) = default;
};

struct QuantizationPolicy {
  bool weight_scaling = true;
  bool activation_scaling = false;
  /// sign(0); fixed so that pack/unpack stay bijective.
  static constexpr float kSignOfZero = 1.0f;
};

template <typename T>
constexpr T sign_of(T v) {
  return v >= T(0) ? T(1) : T(-1);
}

/// Binarizes each filter as sign(w) with alpha = mean |w| (or 1 when
/// weight scaling is off). Alpha is accumulated in double so that
/// re-quantizing alpha * sign(w) reproduces alpha exactly.
BitPlaneTensor quantize_weights(const DenseTensor& w, const QuantizationPolicy& policy);
BitPlaneTensor quantize_weights(const Tensor<double>& w, const QuantizationPolicy& policy);

/// Packs a tensor whose entries are exactly -1 or +1; alphas are set to 1.
BitPlaneTensor pack_bits(const DenseTensor& signs);

/// The +-1 tensor encoded by `b`, without alpha scaling.
DenseTensor unpack_bits(const BitPlaneTensor& b);

/// Dot product of two +-1 vectors of logical length n stored as packed bits:
/// n - 2 * popcount(a ^ b) over the first n bits.
std::int64_t xnor_dot(std::span<const Word> a, std::span<const Word> b, std::size_t n);

/// Sign bits of an activation tensor, one (h*w)-bit plane per (n, c),
/// each plane starting on a word boundary.
class BitActivations {
 public:
  BitActivations() = default;
  explicit BitActivations(Shape4 shape);

  const Shape4& shape() const { return shape_; }
  bool get(std::size_t n, std::size_t c, std::size_t h, std::size_t w) const {
    const std::size_t i = h * shape_.w + w;
    return (words_[plane_offset(n, c) + i / kWordBits] >> (i % kWordBits)) & 1u;
  }
  void set(std::size_t n, std::size_t c, std::size_t h, std::size_t w) {
    const std::size_t i = h * shape_.w + w;
    words_[plane_offset(n, c) + i / kWordBits] |= Word{1} << (i % kWordBits);
  }
  std::span<const Word> words() const { return words_; }

 private:
  std::size_t plane_offset(std::size_t n, std::size_t c) const { return (n * shape_.c + c) * plane_words_; }

  Shape4 shape_;
  std::size_t plane_words_ = 0;
  std::vector<Word> words_;
};

/// sign(x) with sign(0) = +1, packed.
template <typename T>
BitActivations binarize_activations(const Tensor<T>& x);

/// The +-1 tensor encoded by `a`.
DenseTensor unpack_activations(const BitActivations& a);

}  // namespace binloc

#endif  // BINLOC_BITPLANE_HPP_
