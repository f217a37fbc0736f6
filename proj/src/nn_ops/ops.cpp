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

#include "binloc/ops.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "binloc/gemm.hpp"

namespace binloc {

ConvParams ConvParams::square(std::size_t in, std::size_t out, std::size_t k, std::size_t stride) {
  return square(in, out, k, stride, k / 2);
}

ConvParams ConvParams::square(std::size_t in, std::size_t out, std::size_t k, std::size_t stride, std::size_t pad) {
  ConvParams p;
  p.kernel_h = p.kernel_w = k;
  p.stride_h = p.stride_w = stride;
  p.pad_h = p.pad_w = pad;
  p.in_channels = in;
  p.out_channels = out;
  return p;
}

namespace {

std::size_t conv_out(std::size_t in, std::size_t k, std::size_t s, std::size_t pad, const char* axis) {
  if (k == 0 || s == 0) throw ShapeError(std::string("conv: zero kernel or stride along ") + axis);
  if (in + 2 * pad < k) {
    throw ShapeError(std::string("conv: input ") + axis + " " + std::to_string(in) + " with padding " +
                     std::to_string(pad) + " is smaller than kernel " + std::to_string(k));
  }
  return (in + 2 * pad - k) / s + 1;
}

void check_conv_input(const Shape4& x, const ConvParams& p, const char* op) {
  if (x.c != p.in_channels) {
    throw ShapeError(std::string(op) + ": input has " + std::to_string(x.c) + " channels, layer expects " +
                     std::to_string(p.in_channels));
  }
}

}  // namespace

std::size_t ConvParams::out_h(std::size_t h) const { return conv_out(h, kernel_h, stride_h, pad_h, "height"); }
std::size_t ConvParams::out_w(std::size_t w) const { return conv_out(w, kernel_w, stride_w, pad_w, "width"); }

Shape4 ConvParams::output_shape(const Shape4& input) const {
  return {input.n, out_channels, out_h(input.h), out_w(input.w)};
}

// Convolution -------------------------------------------------------------

template <typename T>
Matrix<T> im2col(const Tensor<T>& x, const ConvParams& p, T pad_value) {
  const Shape4& s = x.shape();
  check_conv_input(s, p, "im2col");
  const std::size_t oh = p.out_h(s.h);
  const std::size_t ow = p.out_w(s.w);
  const std::size_t k = p.filter_size();
  Matrix<T> cols(s.n * oh * ow, k);
  for (std::size_t n = 0; n < s.n; ++n) {
    for (std::size_t oy = 0; oy < oh; ++oy) {
      for (std::size_t ox = 0; ox < ow; ++ox) {
        T* row = cols.data.data() + ((n * oh + oy) * ow + ox) * k;
        std::size_t col = 0;
        for (std::size_t c = 0; c < s.c; ++c) {
          const T* plane = x.plane(n, c);
          for (std::size_t dy = 0; dy < p.kernel_h; ++dy) {
            const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(oy * p.stride_h + dy) -
                                      static_cast<std::ptrdiff_t>(p.pad_h);
            const bool row_in = iy >= 0 && iy < static_cast<std::ptrdiff_t>(s.h);
            for (std::size_t dx = 0; dx < p.kernel_w; ++dx, ++col) {
              const std::ptrdiff_t ix = static_cast<std::ptrdiff_t>(ox * p.stride_w + dx) -
                                        static_cast<std::ptrdiff_t>(p.pad_w);
              row[col] = (row_in && ix >= 0 && ix < static_cast<std::ptrdiff_t>(s.w))
                             ? plane[static_cast<std::size_t>(iy) * s.w + static_cast<std::size_t>(ix)]
                             : pad_value;
            }
          }
        }
      }
    }
  }
  return cols;
}

template <typename T>
Tensor<T> col2im(const Matrix<T>& cols, const ConvParams& p, const Shape4& s) {
  check_conv_input(s, p, "col2im");
  const std::size_t oh = p.out_h(s.h);
  const std::size_t ow = p.out_w(s.w);
  const std::size_t k = p.filter_size();
  if (cols.rows != s.n * oh * ow || cols.cols != k) throw ShapeError("col2im: matrix does not match layer");
  Tensor<T> out(s);
  for (std::size_t n = 0; n < s.n; ++n) {
    for (std::size_t oy = 0; oy < oh; ++oy) {
      for (std::size_t ox = 0; ox < ow; ++ox) {
        const T* row = cols.data.data() + ((n * oh + oy) * ow + ox) * k;
        std::size_t col = 0;
        for (std::size_t c = 0; c < s.c; ++c) {
          T* plane = out.plane(n, c);
          for (std::size_t dy = 0; dy < p.kernel_h; ++dy) {
            const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(oy * p.stride_h + dy) -
                                      static_cast<std::ptrdiff_t>(p.pad_h);
            const bool row_in = iy >= 0 && iy < static_cast<std::ptrdiff_t>(s.h);
            for (std::size_t dx = 0; dx < p.kernel_w; ++dx, ++col) {
              const std::ptrdiff_t ix = static_cast<std::ptrdiff_t>(ox * p.stride_w + dx) -
                                        static_cast<std::ptrdiff_t>(p.pad_w);
              if (row_in && ix >= 0 && ix < static_cast<std::ptrdiff_t>(s.w)) {
                plane[static_cast<std::size_t>(iy) * s.w + static_cast<std::size_t>(ix)] += row[col];
              }
            }
          }
        }
      }
    }
  }
  return out;
}

namespace {

void check_weights(const Shape4& w, const ConvParams& p, const char* op) {
  if (w != p.weight_shape()) {
    throw ShapeError(std::string(op) + ": weight shape " + to_string(w) + " does not match layer " +
                     to_string(p.weight_shape()));
  }
}

}  // namespace

template <typename T>
Tensor<T> conv2d_dense(const Tensor<T>& x, const Tensor<T>& w, const ConvParams& p, T pad_value) {
  check_weights(w.shape(), p, "conv2d_dense");
  const Matrix<T> cols = im2col(x, p, pad_value);
  const Shape4 os = p.output_shape(x.shape());
  const std::size_t positions = os.plane();
  const std::size_t total = os.n * positions;
  const std::size_t k = p.filter_size();

  std::vector<T> tmp(p.out_channels * total);
  gemm<T>(Transpose::kNo, Transpose::kYes, p.out_channels, total, k, T(1), w.raw(), k, cols.data.data(), k, T(0),
          tmp.data(), total);
  Tensor<T> out(os);
  for (std::size_t n = 0; n < os.n; ++n)
    for (std::size_t o = 0; o < os.c; ++o)
      std::copy_n(tmp.data() + o * total + n * positions, positions, out.plane(n, o));
  return out;
}

template <typename T>
void conv2d_dense_backward(const Tensor<T>& x, const Tensor<T>& w, const ConvParams& p, const Tensor<T>& grad_out,
                           T pad_value, Tensor<T>* grad_x, Tensor<T>* grad_w) {
  check_weights(w.shape(), p, "conv2d_dense_backward");
  const Shape4 os = p.output_shape(x.shape());
  if (grad_out.shape() != os) throw ShapeError("conv2d_dense_backward: gradient shape mismatch");
  const std::size_t positions = os.plane();
  const std::size_t total = os.n * positions;
  const std::size_t k = p.filter_size();

  std::vector<T> g(p.out_channels * total);
  for (std::size_t n = 0; n < os.n; ++n)
    for (std::size_t o = 0; o < os.c; ++o)
      std::copy_n(grad_out.plane(n, o), positions, g.data() + o * total + n * positions);

  const Matrix<T> cols = im2col(x, p, pad_value);
  if (grad_w != nullptr) {
    *grad_w = Tensor<T>(p.weight_shape());
    gemm<T>(Transpose::kNo, Transpose::kNo, p.out_channels, k, total, T(1), g.data(), total, cols.data.data(), k,
            T(0), grad_w->raw(), k);
  }
  if (grad_x != nullptr) {
    Matrix<T> grad_cols(total, k);
    gemm<T>(Transpose::kYes, Transpose::kNo, total, k, p.out_channels, T(1), g.data(), total, w.raw(), k, T(0),
            grad_cols.data.data(), k);
    *grad_x = col2im(grad_cols, p, x.shape());
  }
}

BitMatrix bit_im2col(const BitActivations& x, const ConvParams& p) {
  const Shape4& s = x.shape();
  check_conv_input(s, p, "bit_im2col");
  const std::size_t oh = p.out_h(s.h);
  const std::size_t ow = p.out_w(s.w);
  BitMatrix cols(s.n * oh * ow, p.filter_size());
  for (std::size_t n = 0; n < s.n; ++n) {
    for (std::size_t oy = 0; oy < oh; ++oy) {
      for (std::size_t ox = 0; ox < ow; ++ox) {
        const std::size_t r = (n * oh + oy) * ow + ox;
        std::size_t col = 0;
        for (std::size_t c = 0; c < s.c; ++c) {
          for (std::size_t dy = 0; dy < p.kernel_h; ++dy) {
            const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(oy * p.stride_h + dy) -
                                      static_cast<std::ptrdiff_t>(p.pad_h);
            const bool row_in = iy >= 0 && iy < static_cast<std::ptrdiff_t>(s.h);
            for (std::size_t dx = 0; dx < p.kernel_w; ++dx, ++col) {
              const std::ptrdiff_t ix = static_cast<std::ptrdiff_t>(ox * p.stride_w + dx) -
                                        static_cast<std::ptrdiff_t>(p.pad_w);
              if (row_in && ix >= 0 && ix < static_cast<std::ptrdiff_t>(s.w) &&
                  x.get(n, c, static_cast<std::size_t>(iy), static_cast<std::size_t>(ix))) {
                cols.set(r, col);
              }
            }
          }
        }
      }
    }
  }
  return cols;
}

template <typename T>
Tensor<T> conv2d_binary(const BitActivations& x, const BitPlaneTensor& w, const ConvParams& p,
                        const Tensor<T>* scale_map) {
  check_weights(w.logical_shape, p, "conv2d_binary");
  if (w.alphas.size() != p.out_channels) throw ShapeError("conv2d_binary: alpha count mismatch");
  const Shape4 os = p.output_shape(x.shape());
  if (scale_map != nullptr && scale_map->shape() != Shape4{os.n, 1, os.h, os.w}) {
    throw ShapeError("conv2d_binary: scale map shape " + to_string(scale_map->shape()));
  }
  const BitMatrix cols = bit_im2col(x, p);
  const std::vector<std::int32_t> acc = gemm_popcount(cols, w.bits);
  const std::size_t positions = os.plane();
  Tensor<T> out(os);
  for (std::size_t n = 0; n < os.n; ++n) {
    for (std::size_t o = 0; o < os.c; ++o) {
      T* dst = out.plane(n, o);
      const T alpha = static_cast<T>(w.alphas[o]);
      for (std::size_t q = 0; q < positions; ++q) {
        dst[q] = alpha * static_cast<T>(acc[(n * positions + q) * os.c + o]);
      }
      if (scale_map != nullptr) {
        const T* k = scale_map->plane(n, 0);
        for (std::size_t q = 0; q < positions; ++q) dst[q] *= k[q];
      }
    }
  }
  return out;
}

template <typename T>
Tensor<T> activation_scale_map(const Tensor<T>& x, const ConvParams& p) {
  const Shape4& s = x.shape();
  check_conv_input(s, p, "activation_scale_map");
  Tensor<T> mean_abs(Shape4{s.n, 1, s.h, s.w});
  for (std::size_t n = 0; n < s.n; ++n) {
    T* dst = mean_abs.plane(n, 0);
    for (std::size_t c = 0; c < s.c; ++c) {
      const T* src = x.plane(n, c);
      for (std::size_t i = 0; i < s.plane(); ++i) dst[i] += std::abs(src[i]);
    }
    for (std::size_t i = 0; i < s.plane(); ++i) dst[i] /= static_cast<T>(s.c);
  }
  ConvParams box = p;
  box.in_channels = box.out_channels = 1;
  Tensor<T> kernel(box.weight_shape(), T(1) / static_cast<T>(p.kernel_h * p.kernel_w));
  return conv2d_dense(mean_abs, kernel, box, T(0));
}

// Pooling -----------------------------------------------------------------

template <typename T>
Tensor<T> pool2d(const Tensor<T>& x, PoolKind kind, std::size_t window, std::size_t stride,
                 std::vector<std::uint32_t>* argmax) {
  if (window == 0 || stride == 0) throw ValueError("pool2d: zero-sized window or stride");
  const Shape4& s = x.shape();
  if (s.h < window || s.w < window) throw ShapeError("pool2d: input " + to_string(s) + " smaller than window");
  const Shape4 os{s.n, s.c, (s.h - window) / stride + 1, (s.w - window) / stride + 1};
  Tensor<T> out(os);
  if (argmax != nullptr) argmax->assign(kind == PoolKind::kMax ? os.size() : 0, 0);
  const T inv_area = T(1) / static_cast<T>(window * window);
  for (std::size_t n = 0; n < s.n; ++n) {
    for (std::size_t c = 0; c < s.c; ++c) {
      const T* src = x.plane(n, c);
      T* dst = out.plane(n, c);
      const std::size_t base = (n * s.c + c) * s.plane();
      for (std::size_t oy = 0; oy < os.h; ++oy) {
        for (std::size_t ox = 0; ox < os.w; ++ox) {
          const std::size_t y0 = oy * stride;
          const std::size_t x0 = ox * stride;
          if (kind == PoolKind::kMax) {
            T best = -std::numeric_limits<T>::infinity();
            std::size_t best_i = y0 * s.w + x0;
            for (std::size_t dy = 0; dy < window; ++dy)
              for (std::size_t dx = 0; dx < window; ++dx) {
                const std::size_t i = (y0 + dy) * s.w + x0 + dx;
                if (src[i] > best) {
                  best = src[i];
                  best_i = i;
                }
              }
            dst[oy * os.w + ox] = best;
            if (argmax != nullptr) (*argmax)[out.index(n, c, oy, ox)] = static_cast<std::uint32_t>(base + best_i);
          } else {
            T sum = T(0);
            for (std::size_t dy = 0; dy < window; ++dy)
              for (std::size_t dx = 0; dx < window; ++dx) sum += src[(y0 + dy) * s.w + x0 + dx];
            dst[oy * os.w + ox] = sum * inv_area;
          }
        }
      }
    }
  }
  return out;
}

template <typename T>
Tensor<T> pool2d_backward(const Tensor<T>& grad_out, const Shape4& s, PoolKind kind, std::size_t window,
                          std::size_t stride, const std::vector<std::uint32_t>& argmax) {
  Tensor<T> grad(s);
  const Shape4& os = grad_out.shape();
  if (kind == PoolKind::kMax) {
    if (argmax.size() != grad_out.size()) throw ShapeError("pool2d_backward: argmax does not match gradient");
    for (std::size_t i = 0; i < grad_out.size(); ++i) grad[argmax[i]] += grad_out[i];
    return grad;
  }
  const T inv_area = T(1) / static_cast<T>(window * window);
  for (std::size_t n = 0; n < os.n; ++n)
    for (std::size_t c = 0; c < os.c; ++c) {
      const T* g = grad_out.plane(n, c);
      T* dst = grad.plane(n, c);
      for (std::size_t oy = 0; oy < os.h; ++oy)
        for (std::size_t ox = 0; ox < os.w; ++ox) {
          const T v = g[oy * os.w + ox] * inv_area;
          for (std::size_t dy = 0; dy < window; ++dy)
            for (std::size_t dx = 0; dx < window; ++dx) dst[(oy * stride + dy) * s.w + ox * stride + dx] += v;
        }
    }
  return grad;
}

// Normalization and activations -------------------------------------------

template <typename T>
Tensor<T> batchnorm(const Tensor<T>& x, BatchNormParams<T>& bn, BatchNormMode mode, BatchNormCache<T>* cache) {
  const Shape4& s = x.shape();
  if (bn.channels() != s.c) {
    throw ShapeError("batchnorm: " + std::to_string(bn.channels()) + " channels vs input " + to_string(s));
  }
  const std::size_t count = s.n * s.plane();
  std::vector<T> mean(s.c);
  std::vector<T> inv_std(s.c);
  if (mode == BatchNormMode::kTrain) {
    if (count == 0) throw ShapeError("batchnorm: empty batch");
    for (std::size_t c = 0; c < s.c; ++c) {
      double sum = 0.0;
      for (std::size_t n = 0; n < s.n; ++n) {
        const T* p = x.plane(n, c);
        for (std::size_t i = 0; i < s.plane(); ++i) sum += p[i];
      }
      const double mu = sum / static_cast<double>(count);
      double sq = 0.0;
      for (std::size_t n = 0; n < s.n; ++n) {
        const T* p = x.plane(n, c);
        for (std::size_t i = 0; i < s.plane(); ++i) {
          const double d = p[i] - mu;
          sq += d * d;
        }
      }
      const double var = sq / static_cast<double>(count);
      mean[c] = static_cast<T>(mu);
      inv_std[c] = static_cast<T>(1.0 / std::sqrt(var + static_cast<double>(bn.epsilon)));
      const double unbiased = count > 1 ? sq / static_cast<double>(count - 1) : var;
      bn.running_mean[c] = (T(1) - bn.momentum) * bn.running_mean[c] + bn.momentum * static_cast<T>(mu);
      bn.running_var[c] = (T(1) - bn.momentum) * bn.running_var[c] + bn.momentum * static_cast<T>(unbiased);
    }
  } else {
    for (std::size_t c = 0; c < s.c; ++c) {
      mean[c] = bn.running_mean[c];
      inv_std[c] = T(1) / std::sqrt(bn.running_var[c] + bn.epsilon);
    }
  }

  Tensor<T> out(s);
  Tensor<T> x_hat;
  if (cache != nullptr) x_hat = Tensor<T>(s);
  for (std::size_t n = 0; n < s.n; ++n)
    for (std::size_t c = 0; c < s.c; ++c) {
      const T* src = x.plane(n, c);
      T* dst = out.plane(n, c);
      T* xh = cache != nullptr ? x_hat.plane(n, c) : nullptr;
      for (std::size_t i = 0; i < s.plane(); ++i) {
        const T v = (src[i] - mean[c]) * inv_std[c];
        if (xh != nullptr) xh[i] = v;
        dst[i] = bn.gamma[c] * v + bn.beta[c];
      }
    }
  if (cache != nullptr) {
    cache->mean = std::move(mean);
    cache->inv_std = std::move(inv_std);
    cache->x_hat = std::move(x_hat);
    cache->batch_stats = mode == BatchNormMode::kTrain;
  }
  return out;
}

template <typename T>
Tensor<T> batchnorm_backward(const Tensor<T>& grad_out, const BatchNormParams<T>& bn, const BatchNormCache<T>& cache,
                             std::vector<T>* grad_gamma, std::vector<T>* grad_beta) {
  const Shape4& s = grad_out.shape();
  if (cache.x_hat.shape() != s) throw ShapeError("batchnorm_backward: cache does not match gradient");
  const std::size_t count = s.n * s.plane();
  Tensor<T> grad(s);
  for (std::size_t c = 0; c < s.c; ++c) {
    double sum_dy = 0.0;
    double sum_dy_xhat = 0.0;
    for (std::size_t n = 0; n < s.n; ++n) {
      const T* dy = grad_out.plane(n, c);
      const T* xh = cache.x_hat.plane(n, c);
      for (std::size_t i = 0; i < s.plane(); ++i) {
        sum_dy += dy[i];
        sum_dy_xhat += static_cast<double>(dy[i]) * xh[i];
      }
    }
    if (grad_gamma != nullptr) (*grad_gamma)[c] += static_cast<T>(sum_dy_xhat);
    if (grad_beta != nullptr) (*grad_beta)[c] += static_cast<T>(sum_dy);
    const T scale = bn.gamma[c] * cache.inv_std[c];
    const T mean_dy = static_cast<T>(sum_dy / static_cast<double>(count));
    const T mean_dy_xhat = static_cast<T>(sum_dy_xhat / static_cast<double>(count));
    for (std::size_t n = 0; n < s.n; ++n) {
      const T* dy = grad_out.plane(n, c);
      const T* xh = cache.x_hat.plane(n, c);
      T* dx = grad.plane(n, c);
      if (cache.batch_stats) {
        for (std::size_t i = 0; i < s.plane(); ++i) dx[i] = scale * (dy[i] - mean_dy - xh[i] * mean_dy_xhat);
      } else {
        for (std::size_t i = 0; i < s.plane(); ++i) dx[i] = scale * dy[i];
      }
    }
  }
  return grad;
}

template <typename T>
Tensor<T> sign_act(const Tensor<T>& x) {
  Tensor<T> out(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = sign_of(x[i]);
  return out;
}

template <typename T>
Tensor<T> sign_backward(const Tensor<T>& grad_out, const Tensor<T>& x) {
  if (grad_out.shape() != x.shape()) throw ShapeError("sign_backward: shape mismatch");
  Tensor<T> out(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::abs(x[i]) <= T(1) ? grad_out[i] : T(0);
  return out;
}

template <typename T>
Tensor<T> relu(const Tensor<T>& x) {
  Tensor<T> out(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] > T(0) ? x[i] : T(0);
  return out;
}

template <typename T>
Tensor<T> relu_backward(const Tensor<T>& grad_out, const Tensor<T>& x) {
  if (grad_out.shape() != x.shape()) throw ShapeError("relu_backward: shape mismatch");
  Tensor<T> out(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] > T(0) ? grad_out[i] : T(0);
  return out;
}

template <typename T>
Tensor<T> upsample_nearest(const Tensor<T>& x, std::size_t factor) {
  if (factor == 0) throw ValueError("upsample_nearest: zero factor");
  const Shape4& s = x.shape();
  Tensor<T> out(Shape4{s.n, s.c, s.h * factor, s.w * factor});
  const std::size_t ow = s.w * factor;
  for (std::size_t n = 0; n < s.n; ++n)
    for (std::size_t c = 0; c < s.c; ++c) {
      const T* src = x.plane(n, c);
      T* dst = out.plane(n, c);
      for (std::size_t y = 0; y < s.h * factor; ++y)
        for (std::size_t xx = 0; xx < ow; ++xx) dst[y * ow + xx] = src[(y / factor) * s.w + xx / factor];
    }
  return out;
}

template <typename T>
Tensor<T> upsample_nearest_backward(const Tensor<T>& grad_out, std::size_t factor) {
  const Shape4& s = grad_out.shape();
  if (factor == 0 || s.h % factor != 0 || s.w % factor != 0) throw ShapeError("upsample backward: bad factor");
  Tensor<T> out(Shape4{s.n, s.c, s.h / factor, s.w / factor});
  const std::size_t ow = s.w / factor;
  for (std::size_t n = 0; n < s.n; ++n)
    for (std::size_t c = 0; c < s.c; ++c) {
      const T* src = grad_out.plane(n, c);
      T* dst = out.plane(n, c);
      for (std::size_t y = 0; y < s.h; ++y)
        for (std::size_t xx = 0; xx < s.w; ++xx) dst[(y / factor) * ow + xx / factor] += src[y * s.w + xx];
    }
  return out;
}

template <typename T>
Tensor<T> concat_channels(const std::vector<const Tensor<T>*>& xs) {
  if (xs.empty()) throw ShapeError("concat_channels: no inputs");
  const Shape4& first = xs.front()->shape();
  std::size_t channels = 0;
  for (const Tensor<T>* t : xs) {
    const Shape4& s = t->shape();
    if (s.n != first.n || s.h != first.h || s.w != first.w) {
      throw ShapeError("concat_channels: " + to_string(s) + " does not match " + to_string(first));
    }
    channels += s.c;
  }
  Tensor<T> out(Shape4{first.n, channels, first.h, first.w});
  for (std::size_t n = 0; n < first.n; ++n) {
    std::size_t c0 = 0;
    for (const Tensor<T>* t : xs) {
      const std::size_t len = t->shape().c * first.plane();
      std::copy_n(t->plane(n, 0), len, out.plane(n, c0));
      c0 += t->shape().c;
    }
  }
  return out;
}

template <typename T>
std::vector<Tensor<T>> split_channels(const Tensor<T>& x, const std::vector<std::size_t>& channels) {
  const Shape4& s = x.shape();
  std::size_t total = 0;
  for (const std::size_t c : channels) total += c;
  if (total != s.c) throw ShapeError("split_channels: widths do not sum to " + std::to_string(s.c));
  std::vector<Tensor<T>> out;
  std::size_t c0 = 0;
  for (const std::size_t c : channels) {
    Tensor<T> part(Shape4{s.n, c, s.h, s.w});
    for (std::size_t n = 0; n < s.n; ++n) std::copy_n(x.plane(n, c0), c * s.plane(), part.plane(n, 0));
    out.push_back(std::move(part));
    c0 += c;
  }
  return out;
}

template <typename T>
Tensor<T> add(const Tensor<T>& x, const Tensor<T>& y) {
  Tensor<T> out = x;
  add_inplace(out, y);
  return out;
}

template <typename T>
void add_inplace(Tensor<T>& x, const Tensor<T>& y) {
  if (x.shape() != y.shape()) throw ShapeError("add: " + to_string(x.shape()) + " vs " + to_string(y.shape()));
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += y[i];
}

#define BINLOC_INSTANTIATE_OPS(T)                                                                                  \
  template Matrix<T> im2col(const Tensor<T>&, const ConvParams&, T);                                               \
  template Tensor<T> col2im(const Matrix<T>&, const ConvParams&, const Shape4&);                                   \
  template Tensor<T> conv2d_dense(const Tensor<T>&, const Tensor<T>&, const ConvParams&, T);                       \
  template void conv2d_dense_backward(const Tensor<T>&, const Tensor<T>&, const ConvParams&, const Tensor<T>&, T,  \
                                      Tensor<T>*, Tensor<T>*);                                                     \
  template Tensor<T> conv2d_binary(const BitActivations&, const BitPlaneTensor&, const ConvParams&,                \
                                   const Tensor<T>*);                                                              \
  template Tensor<T> activation_scale_map(const Tensor<T>&, const ConvParams&);                                    \
  template Tensor<T> pool2d(const Tensor<T>&, PoolKind, std::size_t, std::size_t, std::vector<std::uint32_t>*);    \
  template Tensor<T> pool2d_backward(const Tensor<T>&, const Shape4&, PoolKind, std::size_t, std::size_t,          \
                                     const std::vector<std::uint32_t>&);                                           \
  template Tensor<T> batchnorm(const Tensor<T>&, BatchNormParams<T>&, BatchNormMode, BatchNormCache<T>*);          \
  template Tensor<T> batchnorm_backward(const Tensor<T>&, const BatchNormParams<T>&, const BatchNormCache<T>&,     \
                                        std::vector<T>*, std::vector<T>*);                                         \
  template Tensor<T> sign_act(const Tensor<T>&);                                                                   \
  template Tensor<T> sign_backward(const Tensor<T>&, const Tensor<T>&);                                            \
  template Tensor<T> relu(const Tensor<T>&);                                                                       \
  template Tensor<T> relu_backward(const Tensor<T>&, const Tensor<T>&);                                            \
  template Tensor<T> upsample_nearest(const Tensor<T>&, std::size_t);                                              \
  template Tensor<T> upsample_nearest_backward(const Tensor<T>&, std::size_t);                                     \
  template Tensor<T> concat_channels(const std::vector<const Tensor<T>*>&);                                        \
  template std::vector<Tensor<T>> split_channels(const Tensor<T>&, const std::vector<std::size_t>&);               \
  template Tensor<T> add(const Tensor<T>&, const Tensor<T>&);                                                      \
  template void add_inplace(Tensor<T>&, const Tensor<T>&);

BINLOC_INSTANTIATE_OPS(float)
BINLOC_INSTANTIATE_OPS(double)

#undef BINLOC_INSTANTIATE_OPS

}  // namespace binloc
