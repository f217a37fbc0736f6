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

#ifndef BINLOC_LOSSES_HPP_
#define BINLOC_LOSSES_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "binloc/tensor.hpp"

namespace binloc {

enum class LossKind { kL2Heatmap, kSigmoidCE, kMulticlassCE };

std::string to_string(LossKind k);
LossKind parse_loss_kind(const std::string& s);

template <typename T>
struct LossResult {
  double value = 0.0;
  Tensor<T> grad;  // d value / d prediction
};

/// Mean over elements of (pred - target)^2.
template <typename T>
LossResult<T> loss_l2(const Tensor<T>& pred, const Tensor<T>& target);

/// Mean over elements of the binary cross-entropy between sigmoid(logits) and
/// soft targets in [0, 1].
template <typename T>
LossResult<T> loss_sigmoid_ce(const Tensor<T>& logits, const Tensor<T>& target);

/// Mean over pixels of -log softmax over channels at the labelled class.
/// `mask` holds N * H * W class ids in [0, C).
template <typename T>
LossResult<T> loss_multiclass_ce(const Tensor<T>& logits, const std::vector<std::int32_t>& mask);

}  // namespace binloc

#endif  // BINLOC_LOSSES_HPP_
