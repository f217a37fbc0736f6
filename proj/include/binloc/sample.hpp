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

#ifndef BINLOC_SAMPLE_HPP_
#define BINLOC_SAMPLE_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "binloc/tensor.hpp"

namespace binloc {

struct Keypoint {
  double x = 0.0;
  double y = 0.0;
  bool visible = true;
};

struct BoundingBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;
};

struct Sample {
  DenseTensor image;  // (1, 3, H, W), values in [0, 1]
  std::vector<Keypoint> keypoints;
  double head_size = 0.0;
  BoundingBox bbox;
  std::vector<std::int32_t> mask;  // optional (H', W') class ids, row-major
  std::size_t mask_h = 0;
  std::size_t mask_w = 0;

  std::size_t height() const { return image.shape().h; }
  std::size_t width() const { return image.shape().w; }
};

}  // namespace binloc

#endif  // BINLOC_SAMPLE_HPP_
