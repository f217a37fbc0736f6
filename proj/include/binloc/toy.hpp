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

#ifndef BINLOC_TOY_HPP_
#define BINLOC_TOY_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "binloc/sample.hpp"

namespace binloc {

/// Synthetic landmark images: one Gaussian blob per landmark on a black
/// background, each landmark with its own colour, keypoint at the blob
/// centre.
struct ToyConfig {
  std::size_t image_size = 64;
  double blob_sigma = 2.0;
  double margin = 6.0;  // keypoints stay this far from the border
  double noise = 0.0;   // std of additive pixel noise
};

std::array<float, 3> toy_color(std::size_t landmark, std::size_t landmarks);

DenseTensor render_toy_image(const std::vector<Keypoint>& keypoints, const ToyConfig& cfg);

/// Sample i depends only on (seed, i). head_size is the image size and the
/// bbox covers the whole image.
std::vector<Sample> make_toy_dataset(std::size_t n, std::size_t landmarks, std::uint64_t seed,
                                     const ToyConfig& cfg = {});

}  // namespace binloc

#endif  // BINLOC_TOY_HPP_
