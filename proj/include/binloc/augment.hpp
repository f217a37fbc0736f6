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

#ifndef BINLOC_AUGMENT_HPP_
#define BINLOC_AUGMENT_HPP_

#include <cstddef>
#include <random>
#include <vector>

#include "binloc/sample.hpp"

namespace binloc {

struct AugmentConfig {
  double rotation_deg = 40.0;  // uniform in [-rotation_deg, rotation_deg]
  double scale_min = 0.7;
  double scale_max = 1.3;
  bool hflip = true;  // with probability 1/2
  /// Landmark k of a flipped sample takes the point of landmark swap[k].
  /// Empty means no relabelling.
  std::vector<std::size_t> swap;

  /// Throws ValueError for a non-positive scale range or a swap list that is
  /// not an involution over `landmarks` entries.
  void validate(std::size_t landmarks) const;

  static AugmentConfig identity() { return {0.0, 1.0, 1.0, false, {}}; }
};

struct Transform {
  double angle_deg = 0.0;
  double scale = 1.0;
  bool flip = false;
};

Transform sample_transform(const AugmentConfig& cfg, std::mt19937_64& rng);

/// Flip (x -> W - 1 - x), then rotate and scale about the image centre.
/// Images are resampled bilinearly with zero fill, masks by nearest
/// neighbour. Keypoints leaving the image become invisible.
Sample apply_transform(const Sample& s, const Transform& t, const std::vector<std::size_t>& swap = {});

Sample augment(const Sample& s, const AugmentConfig& cfg, std::mt19937_64& rng);

/// Maps a point through `t` for an image of the given size.
Keypoint transform_point(const Keypoint& p, const Transform& t, std::size_t width, std::size_t height);

}  // namespace binloc

#endif  // BINLOC_AUGMENT_HPP_
