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

#ifndef BINLOC_TRAINER_HPP_
#define BINLOC_TRAINER_HPP_

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "binloc/augment.hpp"
#include "binloc/keyvalue.hpp"
#include "binloc/losses.hpp"
#include "binloc/metrics.hpp"
#include "binloc/model.hpp"
#include "binloc/optim.hpp"
#include "binloc/toy.hpp"

namespace binloc {

struct TrainConfig {
  NetworkSpec net;
  LossKind loss = LossKind::kL2Heatmap;
  std::size_t epochs = 30;
  std::size_t batch_size = 8;
  LrSchedule lr;  // lr.epochs follows `epochs`
  double rms_decay = 0.99;
  double rms_epsilon = 1e-8;
  double sigma = 1.0;
  double pck_thresh = 0.5;  // fraction of head size
  std::uint64_t seed = 1;
  bool augment = false;
  AugmentConfig augmentation;

  // Annotation files; an empty train path selects the toy dataset.
  std::string train_data;
  std::string val_data;
  std::size_t toy_train = 128;
  std::size_t toy_val = 64;
  ToyConfig toy;

  std::string log_path;
  std::string model_out;

  /// Keys are those of NetworkSpec::to_text plus the training keys listed in
  /// the README. Unknown keys throw ValueError.
  static TrainConfig from_key_values(const KeyValues& kv);
};

struct Batch {
  DenseTensor images;                 // (B, 3, H, W)
  DenseTensor targets;                // heatmaps, (B, K, h, w)
  std::vector<std::int32_t> masks;    // class ids, B * h * w
};

/// Stacks samples[idx] into a batch. When `aug` is set, sample idx[i] is
/// transformed with an rng seeded by (seed, epoch, idx[i]).
Batch make_batch(const std::vector<Sample>& samples, const std::vector<std::size_t>& idx, const NetworkSpec& net,
                 LossKind loss, double sigma, const AugmentConfig* aug = nullptr, std::uint64_t seed = 0,
                 std::size_t epoch = 0);

template <typename T>
LossResult<T> compute_loss(LossKind kind, const Tensor<T>& out, const Batch& batch);

struct EpochStats {
  std::size_t epoch = 0;
  double lr = 0.0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_pck = 0.0;  // heatmap heads only
  double seconds = 0.0;
};

struct EvalStats {
  double loss = 0.0;
  double pck = 0.0;
  std::vector<KeypointSet> predictions;
};

class Trainer {
 public:
  Trainer(TrainConfig cfg, Model<float>& model);

  const TrainConfig& config() const { return cfg_; }

  /// One optimizer step; returns the loss before the update.
  double step(const Batch& batch, double lr);
  double train_epoch(const std::vector<Sample>& train, std::size_t epoch);
  EvalStats evaluate(const std::vector<Sample>& val);

  /// Runs all epochs, writing one JSON object per epoch to `log` if given.
  std::vector<EpochStats> fit(const std::vector<Sample>& train, const std::vector<Sample>& val,
                              std::ostream* log = nullptr);

 private:
  TrainConfig cfg_;
  Model<float>& model_;
  RmsProp<float> opt_;
};

/// Heatmap peaks for each sample, in image coordinates.
std::vector<KeypointSet> predict_keypoints(Model<float>& model, const std::vector<Sample>& samples,
                                           std::size_t batch_size = 8);

/// Per-pixel arg-max class at the output resolution, one mask per sample.
std::vector<std::vector<std::int32_t>> predict_segmentation(Model<float>& model, const std::vector<Sample>& samples,
                                                            std::size_t batch_size = 8);

/// Loads train/val data named by the config, or generates the toy sets.
void load_training_data(const TrainConfig& cfg, std::vector<Sample>* train, std::vector<Sample>* val);

}  // namespace binloc

#endif  // BINLOC_TRAINER_HPP_
