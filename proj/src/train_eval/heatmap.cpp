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

#include "binloc/heatmap.hpp"

#include <cmath>

#include "binloc/errors.hpp"

namespace binloc {

DenseTensor gaussian_heatmap(const Keypoint& kp, std::size_t res, double sigma, bool* outside) {
  if (!(sigma > 0.0)) throw ValueError("gaussian_heatmap: sigma must be positive");
  if (!std::isfinite(kp.x) || !std::isfinite(kp.y)) throw ValueError("gaussian_heatmap: non-finite keypoint");
  DenseTensor map(Shape4{1, 1, res, res});
  if (outside != nullptr) *outside = false;
  if (!kp.visible) return map;
  const double cx = std::round(kp.x), cy = std::round(kp.y);
  if (cx < 0 || cy < 0 || cx >= static_cast<double>(res) || cy >= static_cast<double>(res)) {
    if (outside != nullptr) *outside = true;
    return map;
  }
  const double denom = 2.0 * sigma * sigma;
  for (std::size_t y = 0; y < res; ++y)
    for (std::size_t x = 0; x < res; ++x) {
      const double dx = static_cast<double>(x) - cx, dy = static_cast<double>(y) - cy;
      map[y * res + x] = static_cast<float>(std::exp(-(dx * dx + dy * dy) / denom));
    }
  return map;
}

DenseTensor render_heatmaps(const std::vector<Keypoint>& keypoints, std::size_t res, double stride, double sigma) {
  DenseTensor out(Shape4{1, keypoints.size(), res, res});
  for (std::size_t k = 0; k < keypoints.size(); ++k) {
    Keypoint g = keypoints[k];
    g.x = image_to_grid(g.x, stride);
    g.y = image_to_grid(g.y, stride);
    const DenseTensor m = gaussian_heatmap(g, res, sigma);
    std::copy(m.data().begin(), m.data().end(), out.plane(0, k));
  }
  return out;
}

std::vector<std::vector<Peak>> decode_heatmaps(const DenseTensor& maps, double stride) {
  const Shape4& s = maps.shape();
  std::vector<std::vector<Peak>> out(s.n, std::vector<Peak>(s.c));
  for (std::size_t n = 0; n < s.n; ++n)
    for (std::size_t k = 0; k < s.c; ++k) {
      const float* p = maps.plane(n, k);
      std::size_t best = 0;
      for (std::size_t i = 1; i < s.plane(); ++i)
        if (p[i] > p[best]) best = i;
      const std::size_t bx = best % s.w, by = best / s.w;
      double x = static_cast<double>(bx), y = static_cast<double>(by);
      if (bx > 0 && bx + 1 < s.w) x += 0.25 * ((p[best + 1] > p[best - 1]) - (p[best + 1] < p[best - 1]));
      if (by > 0 && by + 1 < s.h) y += 0.25 * ((p[best + s.w] > p[best - s.w]) - (p[best + s.w] < p[best - s.w]));
      out[n][k] = Peak{grid_to_image(x, stride), grid_to_image(y, stride), p[best]};
    }
  return out;
}

}  // namespace binloc
