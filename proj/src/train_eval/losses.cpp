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

#include "binloc/losses.hpp"

#include <algorithm>
#include <cmath>

#include "binloc/errors.hpp"

namespace binloc {

std::string to_string(LossKind k) {
  switch (k) {
    case LossKind::kL2Heatmap: return "l2";
    case LossKind::kSigmoidCE: return "sigmoid_ce";
    case LossKind::kMulticlassCE: return "multiclass_ce";
  }
  return "?";
}

LossKind parse_loss_kind(const std::string& s) {
  for (LossKind k : {LossKind::kL2Heatmap, LossKind::kSigmoidCE, LossKind::kMulticlassCE})
    if (to_string(k) == s) return k;
  throw ValueError("unknown loss '" + s + "'");
}

namespace {

template <typename T>
void check_pair(const Tensor<T>& a, const Tensor<T>& b, const char* what) {
  if (a.shape() != b.shape()) throw ShapeError(std::string(what) + ": " + to_string(a.shape()) + " vs " +
                                               to_string(b.shape()));
  if (a.size() == 0) throw ShapeError(std::string(what) + ": empty input");
  require_finite(a, what);
  require_finite(b, what);
}

}  // namespace

template <typename T>
LossResult<T> loss_l2(const Tensor<T>& pred, const Tensor<T>& target) {
  check_pair(pred, target, "loss_l2");
  LossResult<T> r{0.0, Tensor<T>(pred.shape())};
  const double inv = 1.0 / static_cast<double>(pred.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = static_cast<double>(pred[i]) - target[i];
    sum += d * d;
    r.grad[i] = static_cast<T>(2.0 * d * inv);
  }
  r.value = sum * inv;
  return r;
}

template <typename T>
LossResult<T> loss_sigmoid_ce(const Tensor<T>& logits, const Tensor<T>& target) {
  check_pair(logits, target, "loss_sigmoid_ce");
  LossResult<T> r{0.0, Tensor<T>(logits.shape())};
  const double inv = 1.0 / static_cast<double>(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const double x = logits[i], t = target[i];
    if (t < 0.0 || t > 1.0) throw ValueError("loss_sigmoid_ce: targets must lie in [0, 1]");
    // softplus(x) - t * x, evaluated without overflow.
    sum += std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))) - t * x;
    const double sig = x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
    r.grad[i] = static_cast<T>((sig - t) * inv);
  }
  r.value = sum * inv;
  return r;
}

template <typename T>
LossResult<T> loss_multiclass_ce(const Tensor<T>& logits, const std::vector<std::int32_t>& mask) {
  const Shape4& s = logits.shape();
  if (s.size() == 0) throw ShapeError("loss_multiclass_ce: empty input");
  if (mask.size() != s.n * s.plane())
    throw ShapeError("loss_multiclass_ce: mask has " + std::to_string(mask.size()) + " labels for " + to_string(s));
  require_finite(logits, "loss_multiclass_ce");
  LossResult<T> r{0.0, Tensor<T>(s)};
  const double inv = 1.0 / static_cast<double>(s.n * s.plane());
  double sum = 0.0;
  std::vector<double> e(s.c);
  for (std::size_t n = 0; n < s.n; ++n)
    for (std::size_t i = 0; i < s.plane(); ++i) {
      const std::int32_t label = mask[n * s.plane() + i];
      if (label < 0 || static_cast<std::size_t>(label) >= s.c)
        throw ValueError("loss_multiclass_ce: class id " + std::to_string(label) + " outside [0, " +
                         std::to_string(s.c) + ")");
      double mx = -INFINITY;
      for (std::size_t c = 0; c < s.c; ++c) mx = std::max(mx, static_cast<double>(logits.plane(n, c)[i]));
      double z = 0.0;
      for (std::size_t c = 0; c < s.c; ++c) z += e[c] = std::exp(logits.plane(n, c)[i] - mx);
      sum += std::log(z) + mx - logits.plane(n, static_cast<std::size_t>(label))[i];
      for (std::size_t c = 0; c < s.c; ++c)
        r.grad.plane(n, c)[i] = static_cast<T>((e[c] / z - (static_cast<std::size_t>(label) == c)) * inv);
    }
  r.value = sum * inv;
  return r;
}

#define BINLOC_INSTANTIATE_LOSSES(T)                                                          \
  template LossResult<T> loss_l2(const Tensor<T>&, const Tensor<T>&);                         \
  template LossResult<T> loss_sigmoid_ce(const Tensor<T>&, const Tensor<T>&);                 \
  template LossResult<T> loss_multiclass_ce(const Tensor<T>&, const std::vector<std::int32_t>&);

BINLOC_INSTANTIATE_LOSSES(float)
BINLOC_INSTANTIATE_LOSSES(double)

}  // namespace binloc
