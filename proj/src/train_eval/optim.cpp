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

#include "binloc/optim.hpp"

#include <algorithm>
#include <cmath>

#include "binloc/errors.hpp"

namespace binloc {

template <typename T>
void RmsProp<T>::step(std::vector<ParamRef<T>>& params, double lr) {
  if (!(lr >= 0.0) || !std::isfinite(lr)) throw ValueError("learning rate must be finite and non-negative");
  if (accum_.empty()) {
    for (const auto& p : params) accum_.emplace_back(p.value.size(), T(0));
  }
  if (accum_.size() != params.size()) throw ValueError("parameter list changed between optimizer steps");
  for (std::size_t i = 0; i < params.size(); ++i) {
    ParamRef<T>& p = params[i];
    std::vector<T>& v = accum_[i];
    if (v.size() != p.value.size() || p.grad.size() != p.value.size())
      throw ValueError("parameter " + p.name + " changed size");
    for (std::size_t k = 0; k < v.size(); ++k) {
      const double g = p.grad[k];
      const double acc = decay_ * v[k] + (1.0 - decay_) * g * g;
      v[k] = static_cast<T>(acc);
      double w = p.value[k] - lr * g / (std::sqrt(acc) + epsilon_);
      if (p.clip_unit) w = std::clamp(w, -1.0, 1.0);
      p.value[k] = static_cast<T>(w);
    }
  }
  ++steps_;
}

template class RmsProp<float>;
template class RmsProp<double>;

double LrSchedule::at(std::size_t epoch) const {
  if (drops == 0 || epochs == 0) return initial;
  const double factor = std::pow(final / initial, 1.0 / static_cast<double>(drops));
  std::size_t passed = 0;
  for (std::size_t k = 1; k <= drops; ++k)
    if (static_cast<double>(epoch) * static_cast<double>(drops + 1) >= static_cast<double>(k * epochs)) ++passed;
  return passed == drops ? final : initial * std::pow(factor, static_cast<double>(passed));
}

}  // namespace binloc
