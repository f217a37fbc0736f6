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

#include "binloc/metrics.hpp"

#include <cmath>
#include <limits>

#include "binloc/errors.hpp"

namespace binloc {

namespace {

void check_sets(const std::vector<KeypointSet>& preds, const std::vector<KeypointSet>& gts, std::size_t norms,
                const char* what) {
  if (preds.size() != gts.size() || norms != gts.size())
    throw ShapeError(std::string(what) + ": prediction, ground truth and normaliser counts differ");
  for (std::size_t i = 0; i < gts.size(); ++i)
    if (preds[i].size() != gts[i].size()) throw ShapeError(std::string(what) + ": landmark counts differ");
}

double distance(const Keypoint& a, const Keypoint& b) { return std::hypot(a.x - b.x, a.y - b.y); }

}  // namespace

PckResult pckh(const std::vector<KeypointSet>& preds, const std::vector<KeypointSet>& gts,
               const std::vector<double>& head_sizes, double thresh) {
  check_sets(preds, gts, head_sizes.size(), "pckh");
  const std::size_t k = gts.empty() ? 0 : gts.front().size();
  std::vector<std::size_t> hit(k, 0), total(k, 0);
  for (std::size_t i = 0; i < gts.size(); ++i) {
    if (gts[i].size() != k) throw ShapeError("pckh: samples have different landmark counts");
    if (!(head_sizes[i] > 0.0)) throw ValueError("pckh: head size must be positive");
    for (std::size_t j = 0; j < k; ++j) {
      if (!gts[i][j].visible) continue;
      ++total[j];
      if (distance(preds[i][j], gts[i][j]) <= thresh * head_sizes[i]) ++hit[j];
    }
  }
  PckResult r;
  double sum = 0.0;
  std::size_t counted = 0;
  for (std::size_t j = 0; j < k; ++j) {
    if (total[j] == 0) {
      r.per_joint.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    r.per_joint.push_back(100.0 * static_cast<double>(hit[j]) / static_cast<double>(total[j]));
    sum += r.per_joint.back();
    ++counted;
  }
  r.mean = counted ? sum / static_cast<double>(counted) : 0.0;
  return r;
}

double nme(const std::vector<KeypointSet>& preds, const std::vector<KeypointSet>& gts,
           const std::vector<double>& norms) {
  check_sets(preds, gts, norms.size(), "nme");
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < gts.size(); ++i) {
    if (!(norms[i] > 0.0)) throw ValueError("nme: normaliser must be positive");
    for (std::size_t j = 0; j < gts[i].size(); ++j) {
      if (!gts[i][j].visible) continue;
      sum += distance(preds[i][j], gts[i][j]) / norms[i];
      ++count;
    }
  }
  if (count == 0) throw ValueError("nme: no visible landmarks");
  return 100.0 * sum / static_cast<double>(count);
}

double bbox_norm(const BoundingBox& b) { return std::sqrt(b.w * b.h); }

SegMetrics seg_metrics(const std::vector<std::vector<std::int32_t>>& preds,
                       const std::vector<std::vector<std::int32_t>>& gts, std::size_t classes) {
  if (preds.size() != gts.size()) throw ShapeError("seg_metrics: mask counts differ");
  if (classes == 0) throw ValueError("seg_metrics: no classes");
  // confusion[gt][pred]
  std::vector<std::uint64_t> confusion(classes * classes, 0);
  for (std::size_t i = 0; i < gts.size(); ++i) {
    if (preds[i].size() != gts[i].size()) throw ShapeError("seg_metrics: mask sizes differ");
    for (std::size_t p = 0; p < gts[i].size(); ++p) {
      const auto g = gts[i][p], q = preds[i][p];
      if (g < 0 || q < 0 || static_cast<std::size_t>(g) >= classes || static_cast<std::size_t>(q) >= classes)
        throw ValueError("seg_metrics: class id out of range");
      ++confusion[static_cast<std::size_t>(g) * classes + static_cast<std::size_t>(q)];
    }
  }
  std::uint64_t correct = 0, pixels = 0;
  double acc_sum = 0.0, iu_sum = 0.0;
  std::size_t present = 0;
  for (std::size_t c = 0; c < classes; ++c) {
    std::uint64_t t = 0, predicted = 0;
    for (std::size_t j = 0; j < classes; ++j) {
      t += confusion[c * classes + j];
      predicted += confusion[j * classes + c];
    }
    const std::uint64_t tp = confusion[c * classes + c];
    correct += tp;
    pixels += t;
    if (t == 0) continue;
    ++present;
    acc_sum += static_cast<double>(tp) / static_cast<double>(t);
    iu_sum += static_cast<double>(tp) / static_cast<double>(t + predicted - tp);
  }
  if (pixels == 0) throw ValueError("seg_metrics: empty masks");
  return {static_cast<double>(correct) / static_cast<double>(pixels), acc_sum / static_cast<double>(present),
          iu_sum / static_cast<double>(present)};
}

}  // namespace binloc
