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

#ifndef BINLOC_OPTIM_HPP_
#define BINLOC_OPTIM_HPP_

#include <cstddef>
#include <vector>

#include "binloc/model.hpp"

namespace binloc {

/// v <- decay * v + (1 - decay) * g^2;  w <- w - lr * g / (sqrt(v) + eps).
/// Latent weights of binarized convs are clipped to [-1, 1] afterwards.
template <typename T>
class RmsProp {
 public:
  explicit RmsProp(double decay = 0.99, double epsilon = 1e-8) : decay_(decay), epsilon_(epsilon) {}

  void step(std::vector<ParamRef<T>>& params, double lr);
  std::size_t steps() const { return steps_; }

 private:
  double decay_;
  double epsilon_;
  std::size_t steps_ = 0;
  std::vector<std::vector<T>> accum_;
};

/// Geometric learning-rate decay from `initial` to `final` in `drops` steps,
/// placed at evenly spaced epochs.
struct LrSchedule {
  double initial = 2.5e-4;
  double final = 5e-5;
  std::size_t drops = 4;
  std::size_t epochs = 100;

  double at(std::size_t epoch) const;
};

}  // namespace binloc

#endif  // BINLOC_OPTIM_HPP_
