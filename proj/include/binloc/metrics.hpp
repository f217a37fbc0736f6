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

#ifndef BINLOC_METRICS_HPP_
#define BINLOC_METRICS_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "binloc/sample.hpp"

namespace binloc {

using KeypointSet = std::vector<Keypoint>;

struct PckResult {
  std::vector<double> per_joint;  // percent; NaN for joints never visible
  double mean = 0.0;              // mean over joints with data
};

/// A visible joint counts as correct when its error is <= thresh * head size.
PckResult pckh(const std::vector<KeypointSet>& preds, const std::vector<KeypointSet>& gts,
               const std::vector<double>& head_sizes, double thresh = 0.5);

/// 100 * mean over visible landmarks of error / norm of their sample.
double nme(const std::vector<KeypointSet>& preds, const std::vector<KeypointSet>& gts,
           const std::vector<double>& norms);

/// sqrt(w * h).
double bbox_norm(const BoundingBox& b);

struct SegMetrics {
  double pixel_acc = 0.0;
  double mean_acc = 0.0;
  double mean_iu = 0.0;
};

/// Pixel accuracy, mean class accuracy and mean IU over the classes present
/// in the ground truth.
SegMetrics seg_metrics(const std::vector<std::vector<std::int32_t>>& preds,
                       const std::vector<std::vector<std::int32_t>>& gts, std::size_t classes);

}  // namespace binloc

#endif  // BINLOC_METRICS_HPP_
