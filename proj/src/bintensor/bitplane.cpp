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

#include "binloc/bitplane.hpp"

#include <bit>
#include <cmath>
#include <string>

namespace binloc {

bool BitMatrix::padding_clear() const {
  const std::size_t tail = bits_per_row % kWordBits;
  if (tail == 0 || words_per_row == 0) return true;
  const Word mask = ~Word{0} << tail;
  for (std::size_t r = 0; r < rows; ++r) {
    if (words[r * words_per_row + words_per_row - 1] & mask) return false;
  }
  return true;
}

namespace {

template <typename T>
BitPlaneTensor quantize_impl(const Tensor<T>& w, const QuantizationPolicy& policy) {
  const Shape4& s = w.shape();
  if (s.size() == 0) throw ShapeError("quantize_weights: empty weight tensor " + to_string(s));
  require_finite(w, "quantize_weights");

  BitPlaneTensor out;
  out.logical_shape = s;
  const std::size_t k = s.c * s.h * s.w;
  out.bits = BitMatrix(s.n, k);
  out.alphas.assign(s.n, 1.0f);
  for (std::size_t o = 0; o < s.n; ++o) {
    const T* f = w.raw() + o * k;
    double abs_sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      if (f[i] >= T(0)) out.bits.set(o, i);
      abs_sum += std::abs(static_cast<double>(f[i]));
    }
    if (policy.weight_scaling) out.alphas[o] = static_cast<float>(abs_sum / static_cast<double>(k));
  }
  return out;
}

}  // namespace

BitPlaneTensor quantize_weights(const DenseTensor& w, const QuantizationPolicy& policy) {
  return quantize_impl(w, policy);
}

BitPlaneTensor quantize_weights(const Tensor<double>& w, const QuantizationPolicy& policy) {
  return quantize_impl(w, policy);
}

BitPlaneTensor pack_bits(const DenseTensor& signs) {
  const Shape4& s = signs.shape();
  if (s.size() == 0) throw ShapeError("pack_bits: empty tensor");
  const std::size_t k = s.c * s.h * s.w;
  BitPlaneTensor out;
  out.logical_shape = s;
  out.bits = BitMatrix(s.n, k);
  out.alphas.assign(s.n, 1.0f);
  for (std::size_t o = 0; o < s.n; ++o) {
    for (std::size_t i = 0; i < k; ++i) {
      const float v = signs[o * k + i];
      if (v == 1.0f) {
        out.bits.set(o, i);
      } else if (v != -1.0f) {
        throw ValueError("pack_bits: value " + std::to_string(v) + " at index " + std::to_string(o * k + i) +
                         " is not +-1");
      }
    }
  }
  return out;
}

DenseTensor unpack_bits(const BitPlaneTensor& b) {
  const Shape4& s = b.logical_shape;
  const std::size_t k = s.c * s.h * s.w;
  DenseTensor out(s);
  for (std::size_t o = 0; o < s.n; ++o) {
    for (std::size_t i = 0; i < k; ++i) out[o * k + i] = b.bits.get(o, i) ? 1.0f : -1.0f;
  }
  return out;
}

std::int64_t xnor_dot(std::span<const Word> a, std::span<const Word> b, std::size_t n) {
  const std::size_t nw = words_for_bits(n);
  if (a.size() < nw || b.size() < nw || a.size() != b.size()) {
    throw ShapeError("xnor_dot: operands hold " + std::to_string(a.size()) + " and " + std::to_string(b.size()) +
                     " words, need " + std::to_string(nw) + " each for n=" + std::to_string(n));
  }
  std::int64_t mismatches = 0;
  for (std::size_t i = 0; i + 1 < nw; ++i) mismatches += std::popcount(a[i] ^ b[i]);
  if (nw > 0) {
    const std::size_t tail = n % kWordBits;
    const Word mask = tail == 0 ? ~Word{0} : (Word{1} << tail) - 1;
    mismatches += std::popcount((a[nw - 1] ^ b[nw - 1]) & mask);
  }
  return static_cast<std::int64_t>(n) - 2 * mismatches;
}

BitActivations::BitActivations(Shape4 shape)
    : shape_(shape), plane_words_(words_for_bits(shape.plane())), words_(shape.n * shape.c * plane_words_, 0) {}

template <typename T>
BitActivations binarize_activations(const Tensor<T>& x) {
  const Shape4& s = x.shape();
  BitActivations out(s);
  for (std::size_t n = 0; n < s.n; ++n)
    for (std::size_t c = 0; c < s.c; ++c) {
      const T* p = x.plane(n, c);
      for (std::size_t h = 0; h < s.h; ++h)
        for (std::size_t w = 0; w < s.w; ++w)
          if (p[h * s.w + w] >= T(0)) out.set(n, c, h, w);
    }
  return out;
}

template BitActivations binarize_activations(const Tensor<float>&);
template BitActivations binarize_activations(const Tensor<double>&);

DenseTensor unpack_activations(const BitActivations& a) {
  const Shape4& s = a.shape();
  DenseTensor out(s);
  for (std::size_t n = 0; n < s.n; ++n)
    for (std::size_t c = 0; c < s.c; ++c)
      for (std::size_t h = 0; h < s.h; ++h)
        for (std::size_t w = 0; w < s.w; ++w) out.at(n, c, h, w) = a.get(n, c, h, w) ? 1.0f : -1.0f;
  return out;
}

}  // namespace binloc
