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

#ifndef BINLOC_HEATMAP_HPP_
#define BINLOC_HEATMAP_HPP_

#include <cstddef>
#include <vector>

#include "binloc/sample.hpp"

namespace binloc {

/// Image pixel centre to output-grid coordinate for a map `stride` times
/// smaller than the image, and back.
inline double image_to_grid(double v, double stride) { return (v + 0.5) / stride - 0.5; }
inline double grid_to_image(double v, double stride) { return (v + 0.5) * stride - 0.5; }

/// res x res map with exp(-d^2 / (2 sigma^2)) centred on the grid point
/// nearest to `kp` (given in grid coordinates), so the peak is exactly 1.
/// Invisible keypoints give a zero map; so do keypoints whose nearest grid
/// point lies outside, which also sets *outside. Throws ValueError for
/// sigma <= 0.
DenseTensor gaussian_heatmap(const Keypoint& kp, std::size_t res, double sigma, bool* outside = nullptr);

/// (1, K, res, res) targets for a sample whose image is `stride` times the
/// map size.
DenseTensor render_heatmaps(const std::vector<Keypoint>& keypoints, std::size_t res, double stride, double sigma);

struct Peak {
  double x = 0.0;  // image coordinates
  double y = 0.0;
  double confidence = 0.0;  // map value at the peak
};

/// Arg-max of every map in (N, K, h, w), mapped back to image coordinates.
/// The peak moves a quarter pixel towards the higher neighbour.
std::vector<std::vector<Peak>> decode_heatmaps(const DenseTensor& maps, double stride);

}  // namespace binloc

#endif  // BINLOC_HEATMAP_HPP_
