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

#ifndef BINLOC_TENSOR_HPP_
#define BINLOC_TENSOR_HPP_

#include <algorithm>
#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "binloc/errors.hpp"

namespace binloc {

/// (n, c, h, w) extent of a 4-D tensor. Weight tensors reuse it as
/// (out_channels, in_channels, kernel_h, kernel_w).
struct Shape4 {
  std::size_t n = 0;
  std::size_t c = 0;
  std::size_t h = 0;
  std::size_t w = 0;

  constexpr std::size_t size() const { return n * c * h * w; }
  constexpr std::size_t plane() const { return h * w; }
  friend constexpr bool operator==(const Shape4&, const Shape4&) = default;
};

std::string to_string(const Shape4& s);
std::ostream& operator<<(std::ostream& os, const Shape4& s);

/// Dense row-major (n, c, h, w) tensor.
template <typename T>
class Tensor {
 public:
  using value_type = T;

  Tensor() = default;
  explicit Tensor(Shape4 shape, T fill = T(0)) : shape_(shape), data_(shape.size(), fill) {}
  Tensor(Shape4 shape, std::vector<T> data) : shape_(shape), data_(std::move(data)) {
    if (data_.size() != shape_.size()) {
      throw ShapeError("tensor data length " + std::to_string(data_.size()) +
                       " does not match shape " + to_string(shape_));
    }
  }

  const Shape4& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  std::span<T> data() { return data_; }
  std::span<const T> data() const { return data_; }
  T* raw() { return data_.data(); }
  const T* raw() const { return data_.data(); }

  std::size_t index(std::size_t n, std::size_t c, std::size_t h, std::size_t w) const {
    return ((n * shape_.c + c) * shape_.h + h) * shape_.w + w;
  }
  T& at(std::size_t n, std::size_t c, std::size_t h, std::size_t w) { return data_[index(n, c, h, w)]; }
  const T& at(std::size_t n, std::size_t c, std::size_t h, std::size_t w) const {
    return data_[index(n, c, h, w)];
  }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  /// Pointer to the h*w plane of (n, c).
  T* plane(std::size_t n, std::size_t c) { return data_.data() + (n * shape_.c + c) * shape_.plane(); }
  const T* plane(std::size_t n, std::size_t c) const {
    return data_.data() + (n * shape_.c + c) * shape_.plane();
  }

  void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

  /// Same data, new shape of equal element count.
  Tensor reshaped(Shape4 s) const {
    if (s.size() != shape_.size()) throw ShapeError("reshape " + to_string(shape_) + " -> " + to_string(s));
    return Tensor(s, data_);
  }

  /// Batch item range [first, first + count).
  Tensor slice_batch(std::size_t first, std::size_t count) const;

  friend bool operator==(const Tensor& a, const Tensor& b) { return a.shape_ == b.shape_ && a.data_ == b.data_; }

 private:
  Shape4 shape_;
  std::vector<T> data_;
};

using DenseTensor = Tensor<float>;

template <typename T>
Tensor<T> Tensor<T>::slice_batch(std::size_t first, std::size_t count) const {
  if (first + count > shape_.n) throw ShapeError("batch slice out of range");
  const std::size_t item = shape_.c * shape_.plane();
  std::vector<T> out(data_.begin() + static_cast<std::ptrdiff_t>(first * item),
                     data_.begin() + static_cast<std::ptrdiff_t>((first + count) * item));
  return Tensor(Shape4{count, shape_.c, shape_.h, shape_.w}, std::move(out));
}

/// Element-type conversion, e.g. float weights into a double-precision model.
template <typename To, typename From>
Tensor<To> tensor_cast(const Tensor<From>& t) {
  std::vector<To> out(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) out[i] = static_cast<To>(t[i]);
  return Tensor<To>(t.shape(), std::move(out));
}

/// Throws ValueError if any element is NaN or infinite.
template <typename T>
void require_finite(const Tensor<T>& t, const char* what);

/// Simple row-major matrix used for lowered convolutions.
template <typename T>
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<T> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, T fill = T(0)) : rows(r), cols(c), data(r * c, fill) {}
  T& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

}  // namespace binloc

#endif  // BINLOC_TENSOR_HPP_
