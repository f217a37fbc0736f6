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

#include "binloc/toy.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "binloc/errors.hpp"

namespace binloc {

std::array<float, 3> toy_color(std::size_t landmark, std::size_t landmarks) {
  // Evenly spaced hues at full saturation and value.
  const double h = 6.0 * static_cast<double>(landmark) / static_cast<double>(std::max<std::size_t>(landmarks, 1));
  const int sector = static_cast<int>(h) % 6;
  const float f = static_cast<float>(h - std::floor(h));
  switch (sector) {
    case 0: return {1.0f, f, 0.0f};
    case 1: return {1.0f - f, 1.0f, 0.0f};
    case 2: return {0.0f, 1.0f, f};
    case 3: return {0.0f, 1.0f - f, 1.0f};
    case 4: return {f, 0.0f, 1.0f};
    default: return {1.0f, 0.0f, 1.0f - f};
  }
}

DenseTensor render_toy_image(const std::vector<Keypoint>& keypoints, const ToyConfig& cfg) {
  const std::size_t s = cfg.image_size;
  DenseTensor img(Shape4{1, 3, s, s});
  const double denom = 2.0 * cfg.blob_sigma * cfg.blob_sigma;
  for (std::size_t k = 0; k < keypoints.size(); ++k) {
    if (!keypoints[k].visible) continue;
    const auto color = toy_color(k, keypoints.size());
    for (std::size_t y = 0; y < s; ++y)
      for (std::size_t x = 0; x < s; ++x) {
        const double dx = static_cast<double>(x) - keypoints[k].x, dy = static_cast<double>(y) - keypoints[k].y;
        const float v = static_cast<float>(std::exp(-(dx * dx + dy * dy) / denom));
        for (std::size_t c = 0; c < 3; ++c) {
          float& px = img.plane(0, c)[y * s + x];
          px = std::max(px, color[c] * v);
        }
      }
  }
  return img;
}

std::vector<Sample> make_toy_dataset(std::size_t n, std::size_t landmarks, std::uint64_t seed, const ToyConfig& cfg) {
  if (landmarks == 0) throw ValueError("toy dataset needs at least one landmark");
  if (2.0 * cfg.margin >= static_cast<double>(cfg.image_size)) throw ValueError("toy margin leaves no room");
  std::vector<Sample> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i >> 32)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> pos(cfg.margin, static_cast<double>(cfg.image_size) - 1.0 - cfg.margin);
    Sample s;
    for (std::size_t k = 0; k < landmarks; ++k) s.keypoints.push_back({pos(rng), pos(rng), true});
    s.image = render_toy_image(s.keypoints, cfg);
    if (cfg.noise > 0.0) {
      std::normal_distribution<float> noise(0.0f, static_cast<float>(cfg.noise));
      for (float& v : s.image.data()) v = std::clamp(v + noise(rng), 0.0f, 1.0f);
    }
    s.head_size = static_cast<double>(cfg.image_size);
    s.bbox = {0.0, 0.0, static_cast<double>(cfg.image_size), static_cast<double>(cfg.image_size)};
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace binloc
