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

#include "binloc/augment.hpp"

#include <cmath>
#include <numbers>

#include "binloc/errors.hpp"

namespace binloc {

void AugmentConfig::validate(std::size_t landmarks) const {
  if (!(scale_min > 0.0) || !(scale_max >= scale_min)) throw ValueError("augment: scale range must be positive");
  if (!(rotation_deg >= 0.0)) throw ValueError("augment: rotation range must be non-negative");
  if (swap.empty()) return;
  if (swap.size() != landmarks) throw ValueError("augment: swap list needs one entry per landmark");
  for (std::size_t k = 0; k < swap.size(); ++k)
    if (swap[k] >= swap.size() || swap[swap[k]] != k) throw ValueError("augment: swap list is not an involution");
}

Transform sample_transform(const AugmentConfig& cfg, std::mt19937_64& rng) {
  Transform t;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  t.angle_deg = (2.0 * unit(rng) - 1.0) * cfg.rotation_deg;
  t.scale = cfg.scale_min + unit(rng) * (cfg.scale_max - cfg.scale_min);
  t.flip = cfg.hflip && unit(rng) < 0.5;
  return t;
}

namespace {

struct Affine {
  // p' = A p + b
  double a00, a01, a10, a11, b0, b1;

  Keypoint apply(double x, double y) const { return {a00 * x + a01 * y + b0, a10 * x + a11 * y + b1, true}; }

  Affine inverse() const {
    const double det = a00 * a11 - a01 * a10;
    Affine r{a11 / det, -a01 / det, -a10 / det, a00 / det, 0, 0};
    r.b0 = -(r.a00 * b0 + r.a01 * b1);
    r.b1 = -(r.a10 * b0 + r.a11 * b1);
    return r;
  }
};

Affine forward_map(const Transform& t, std::size_t width, std::size_t height) {
  const double cx = (static_cast<double>(width) - 1.0) / 2.0, cy = (static_cast<double>(height) - 1.0) / 2.0;
  const double th = t.angle_deg * std::numbers::pi / 180.0;
  const double c = t.scale * std::cos(th), s = t.scale * std::sin(th);
  // Flip about the vertical centre line first.
  const double f = t.flip ? -1.0 : 1.0;
  Affine m{c * f, -s, s * f, c, 0, 0};
  // Centre stays put: b = center - A * center.
  m.b0 = cx - (m.a00 * cx + m.a01 * cy);
  m.b1 = cy - (m.a10 * cx + m.a11 * cy);
  return m;
}

bool inside(const Keypoint& p, std::size_t width, std::size_t height) {
  return p.x >= 0.0 && p.y >= 0.0 && p.x <= static_cast<double>(width) - 1.0 &&
         p.y <= static_cast<double>(height) - 1.0;
}

}  // namespace

Keypoint transform_point(const Keypoint& p, const Transform& t, std::size_t width, std::size_t height) {
  Keypoint q = forward_map(t, width, height).apply(p.x, p.y);
  q.visible = p.visible && inside(q, width, height);
  return q;
}

Sample apply_transform(const Sample& s, const Transform& t, const std::vector<std::size_t>& swap) {
  const std::size_t w = s.width(), h = s.height(), channels = s.image.shape().c;
  const Affine inv = forward_map(t, w, h).inverse();
  Sample out = s;
  out.image = DenseTensor(s.image.shape());
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x) {
      const Keypoint src = inv.apply(static_cast<double>(x), static_cast<double>(y));
      const double fx = std::floor(src.x), fy = std::floor(src.y);
      const double ax = src.x - fx, ay = src.y - fy;
      const long x0 = static_cast<long>(fx), y0 = static_cast<long>(fy);
      for (std::size_t c = 0; c < channels; ++c) {
        const float* in = s.image.plane(0, c);
        double acc = 0.0;
        for (int dy = 0; dy < 2; ++dy)
          for (int dx = 0; dx < 2; ++dx) {
            const double wgt = (dx ? ax : 1.0 - ax) * (dy ? ay : 1.0 - ay);
            const long xx = x0 + dx, yy = y0 + dy;
            if (wgt == 0.0 || xx < 0 || yy < 0 || xx >= static_cast<long>(w) || yy >= static_cast<long>(h)) continue;
            acc += wgt * in[static_cast<std::size_t>(yy) * w + static_cast<std::size_t>(xx)];
          }
        out.image.plane(0, c)[y * w + x] = static_cast<float>(acc);
      }
    }

  if (!s.mask.empty()) {
    const Affine minv = forward_map(t, s.mask_w, s.mask_h).inverse();
    for (std::size_t y = 0; y < s.mask_h; ++y)
      for (std::size_t x = 0; x < s.mask_w; ++x) {
        const Keypoint src = minv.apply(static_cast<double>(x), static_cast<double>(y));
        const long xx = std::lround(src.x), yy = std::lround(src.y);
        const bool ok = xx >= 0 && yy >= 0 && xx < static_cast<long>(s.mask_w) && yy < static_cast<long>(s.mask_h);
        out.mask[y * s.mask_w + x] = ok ? s.mask[static_cast<std::size_t>(yy) * s.mask_w + static_cast<std::size_t>(xx)] : 0;
      }
  }

  for (std::size_t k = 0; k < s.keypoints.size(); ++k) {
    const std::size_t from = t.flip && !swap.empty() ? swap.at(k) : k;
    out.keypoints[k] = transform_point(s.keypoints[from], t, w, h);
  }
  out.head_size = s.head_size * t.scale;
  if (s.bbox.w > 0 && s.bbox.h > 0) {
    const Affine m = forward_map(t, w, h);
    double x0 = INFINITY, y0 = INFINITY, x1 = -INFINITY, y1 = -INFINITY;
    for (double cx : {s.bbox.x, s.bbox.x + s.bbox.w})
      for (double cy : {s.bbox.y, s.bbox.y + s.bbox.h}) {
        const Keypoint p = m.apply(cx, cy);
        x0 = std::min(x0, p.x), x1 = std::max(x1, p.x);
        y0 = std::min(y0, p.y), y1 = std::max(y1, p.y);
      }
    out.bbox = {x0, y0, x1 - x0, y1 - y0};
  }
  return out;
}

Sample augment(const Sample& s, const AugmentConfig& cfg, std::mt19937_64& rng) {
  cfg.validate(s.keypoints.size());
  return apply_transform(s, sample_transform(cfg, rng), cfg.swap);
}

}  // namespace binloc
