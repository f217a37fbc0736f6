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

#include "binloc/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "binloc/dataset_io.hpp"
#include "binloc/errors.hpp"
#include "binloc/heatmap.hpp"

namespace binloc {

namespace {

const std::set<std::string> kNetworkKeys = {"block",   "channels", "hg_depth",        "input_resolution", "head",
                                            "outputs", "binarize", "relu_after_conv", "block_pool"};

std::vector<std::size_t> parse_index_list(const std::string& key, const std::string& v) {
  std::vector<std::size_t> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(std::remove_if(item.begin(), item.end(), ::isspace), item.end());
    if (!item.empty()) out.push_back(parse_size(key, item));
  }
  return out;
}

std::seed_seq make_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return std::seed_seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                       static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b),
                       static_cast<std::uint32_t>(b >> 32)};
}

}  // namespace

TrainConfig TrainConfig::from_key_values(const KeyValues& kv) {
  TrainConfig c;
  std::string net_text;
  for (const auto& [k, v] : kv) {
    if (kNetworkKeys.count(k)) {
      net_text += k + " = " + v + "\n";
    } else if (k == "loss") {
      c.loss = parse_loss_kind(v);
    } else if (k == "epochs") {
      c.epochs = parse_size(k, v);
    } else if (k == "batch_size") {
      c.batch_size = parse_size(k, v);
    } else if (k == "lr_initial") {
      c.lr.initial = parse_double(k, v);
    } else if (k == "lr_final") {
      c.lr.final = parse_double(k, v);
    } else if (k == "lr_drops") {
      c.lr.drops = parse_size(k, v);
    } else if (k == "rms_decay") {
      c.rms_decay = parse_double(k, v);
    } else if (k == "rms_epsilon") {
      c.rms_epsilon = parse_double(k, v);
    } else if (k == "sigma") {
      c.sigma = parse_double(k, v);
    } else if (k == "pck_thresh") {
      c.pck_thresh = parse_double(k, v);
    } else if (k == "seed") {
      c.seed = parse_size(k, v);
    } else if (k == "augment") {
      c.augment = parse_bool(k, v);
    } else if (k == "rotation_deg") {
      c.augmentation.rotation_deg = parse_double(k, v);
    } else if (k == "scale_min") {
      c.augmentation.scale_min = parse_double(k, v);
    } else if (k == "scale_max") {
      c.augmentation.scale_max = parse_double(k, v);
    } else if (k == "hflip") {
      c.augmentation.hflip = parse_bool(k, v);
    } else if (k == "swap") {
      c.augmentation.swap = parse_index_list(k, v);
    } else if (k == "train_data") {
      c.train_data = v;
    } else if (k == "val_data") {
      c.val_data = v;
    } else if (k == "toy_train") {
      c.toy_train = parse_size(k, v);
    } else if (k == "toy_val") {
      c.toy_val = parse_size(k, v);
    } else if (k == "toy_noise") {
      c.toy.noise = parse_double(k, v);
    } else if (k == "toy_blob_sigma") {
      c.toy.blob_sigma = parse_double(k, v);
    } else if (k == "log") {
      c.log_path = v;
    } else if (k == "model_out") {
      c.model_out = v;
    } else {
      throw ValueError("unknown config key '" + k + "'");
    }
  }
  c.net = NetworkSpec::from_text(net_text);
  c.toy.image_size = c.net.input_resolution;
  c.lr.epochs = c.epochs;
  if (c.batch_size == 0) throw ValueError("batch_size must be positive");
  if (!(c.sigma > 0.0)) throw ValueError("sigma must be positive");
  if (!(c.lr.initial > 0.0) || !(c.lr.final > 0.0)) throw ValueError("learning rates must be positive");
  if (!(c.rms_decay >= 0.0 && c.rms_decay < 1.0)) throw ValueError("rms_decay must lie in [0, 1)");
  if (c.loss == LossKind::kMulticlassCE && c.net.head != HeadKind::kSegmentation)
    throw ValueError("multiclass_ce needs head = segmentation");
  if (c.loss != LossKind::kMulticlassCE && c.net.head == HeadKind::kSegmentation)
    throw ValueError("segmentation heads train with loss = multiclass_ce");
  c.augmentation.validate(c.net.outputs);
  return c;
}

Batch make_batch(const std::vector<Sample>& samples, const std::vector<std::size_t>& idx, const NetworkSpec& net,
                 LossKind loss, double sigma, const AugmentConfig* aug, std::uint64_t seed, std::size_t epoch) {
  if (idx.empty()) throw ValueError("make_batch: empty batch");
  const std::size_t res = net.input_resolution, out = net.output_resolution(), b = idx.size();
  const double stride = static_cast<double>(res) / static_cast<double>(out);
  Batch batch;
  batch.images = DenseTensor(net.input_shape(b));
  if (loss == LossKind::kMulticlassCE) batch.masks.resize(b * out * out);
  else batch.targets = DenseTensor(net.output_shape(b));
  for (std::size_t i = 0; i < b; ++i) {
    const Sample* s = &samples.at(idx[i]);
    Sample tmp;
    if (aug != nullptr) {
      auto seq = make_seed(seed, epoch, idx[i]);
      std::mt19937_64 rng(seq);
      tmp = augment(*s, *aug, rng);
      s = &tmp;
    }
    if (s->height() != res || s->width() != res || s->image.shape().c != 3)
      throw ShapeError("sample " + std::to_string(idx[i]) + " is " + to_string(s->image.shape()) +
                       ", network expects 3 x " + std::to_string(res) + " x " + std::to_string(res));
    std::copy(s->image.data().begin(), s->image.data().end(), batch.images.plane(i, 0));
    if (loss == LossKind::kMulticlassCE) {
      if (s->mask.empty()) throw ValueError("sample " + std::to_string(idx[i]) + " has no mask");
      for (std::size_t y = 0; y < out; ++y)
        for (std::size_t x = 0; x < out; ++x) {
          const std::size_t sy = std::min(s->mask_h - 1, (2 * y + 1) * s->mask_h / (2 * out));
          const std::size_t sx = std::min(s->mask_w - 1, (2 * x + 1) * s->mask_w / (2 * out));
          batch.masks[(i * out + y) * out + x] = s->mask[sy * s->mask_w + sx];
        }
    } else {
      if (s->keypoints.size() != net.outputs)
        throw ShapeError("sample " + std::to_string(idx[i]) + " has " + std::to_string(s->keypoints.size()) +
                         " keypoints, network predicts " + std::to_string(net.outputs));
      const DenseTensor maps = render_heatmaps(s->keypoints, out, stride, sigma);
      std::copy(maps.data().begin(), maps.data().end(), batch.targets.plane(i, 0));
    }
  }
  return batch;
}

template <typename T>
LossResult<T> compute_loss(LossKind kind, const Tensor<T>& out, const Batch& batch) {
  switch (kind) {
    case LossKind::kL2Heatmap: return loss_l2(out, tensor_cast<T>(batch.targets));
    case LossKind::kSigmoidCE: return loss_sigmoid_ce(out, tensor_cast<T>(batch.targets));
    case LossKind::kMulticlassCE: return loss_multiclass_ce(out, batch.masks);
  }
  throw ValueError("unknown loss");
}

template LossResult<float> compute_loss(LossKind, const Tensor<float>&, const Batch&);
template LossResult<double> compute_loss(LossKind, const Tensor<double>&, const Batch&);

Trainer::Trainer(TrainConfig cfg, Model<float>& model)
    : cfg_(std::move(cfg)), model_(model), opt_(cfg_.rms_decay, cfg_.rms_epsilon) {
  cfg_.lr.epochs = cfg_.epochs;
}

double Trainer::step(const Batch& batch, double lr) {
  const DenseTensor out = model_.forward(batch.images, BatchNormMode::kTrain);
  const LossResult<float> loss = compute_loss(cfg_.loss, out, batch);
  model_.zero_grad();
  model_.backward(loss.grad);
  auto params = model_.parameters();
  opt_.step(params, lr);
  return loss.value;
}

double Trainer::train_epoch(const std::vector<Sample>& train, std::size_t epoch) {
  if (train.empty()) throw ValueError("empty training set");
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  auto seq = make_seed(cfg_.seed, epoch, ~std::uint64_t{0});
  std::mt19937_64 rng(seq);
  std::shuffle(order.begin(), order.end(), rng);
  const double lr = cfg_.lr.at(epoch);
  double sum = 0.0;
  std::size_t seen = 0;
  for (std::size_t start = 0; start < order.size(); start += cfg_.batch_size) {
    const std::size_t end = std::min(order.size(), start + cfg_.batch_size);
    // A lone leftover sample would give degenerate batch statistics.
    if (end - start < 2 && seen > 0) break;
    const std::vector<std::size_t> idx(order.begin() + static_cast<long>(start), order.begin() + static_cast<long>(end));
    const Batch b = make_batch(train, idx, cfg_.net, cfg_.loss, cfg_.sigma, cfg_.augment ? &cfg_.augmentation : nullptr,
                               cfg_.seed, epoch);
    sum += step(b, lr) * static_cast<double>(idx.size());
    seen += idx.size();
  }
  return sum / static_cast<double>(seen);
}

EvalStats Trainer::evaluate(const std::vector<Sample>& val) {
  EvalStats st;
  if (val.empty()) return st;
  double sum = 0.0;
  const double stride = static_cast<double>(cfg_.net.input_resolution) / cfg_.net.output_resolution();
  for (std::size_t start = 0; start < val.size(); start += cfg_.batch_size) {
    std::vector<std::size_t> idx;
    for (std::size_t i = start; i < std::min(val.size(), start + cfg_.batch_size); ++i) idx.push_back(i);
    const Batch b = make_batch(val, idx, cfg_.net, cfg_.loss, cfg_.sigma);
    const DenseTensor out = model_.forward(b.images, BatchNormMode::kEval);
    sum += compute_loss(cfg_.loss, out, b).value * static_cast<double>(idx.size());
    if (cfg_.net.head == HeadKind::kHeatmaps)
      for (const auto& peaks : decode_heatmaps(out, stride)) {
        KeypointSet ks;
        for (const Peak& p : peaks) ks.push_back({p.x, p.y, true});
        st.predictions.push_back(std::move(ks));
      }
  }
  st.loss = sum / static_cast<double>(val.size());
  if (cfg_.net.head == HeadKind::kHeatmaps) {
    std::vector<KeypointSet> gts;
    std::vector<double> heads;
    for (const Sample& s : val) {
      gts.push_back(s.keypoints);
      heads.push_back(s.head_size > 0 ? s.head_size : static_cast<double>(s.width()));
    }
    st.pck = pckh(st.predictions, gts, heads, cfg_.pck_thresh).mean;
  }
  return st;
}

std::vector<EpochStats> Trainer::fit(const std::vector<Sample>& train, const std::vector<Sample>& val,
                                     std::ostream* log) {
  std::vector<EpochStats> history;
  for (std::size_t e = 0; e < cfg_.epochs; ++e) {
    const auto t0 = std::chrono::steady_clock::now();
    EpochStats s;
    s.epoch = e + 1;
    s.lr = cfg_.lr.at(e);
    s.train_loss = train_epoch(train, e);
    const EvalStats ev = evaluate(val);
    s.val_loss = ev.loss;
    s.val_pck = ev.pck;
    s.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    history.push_back(s);
    if (log != nullptr) {
      nlohmann::json j = {{"epoch", s.epoch},       {"lr", s.lr},           {"train_loss", s.train_loss},
                          {"val_loss", s.val_loss}, {"val_pck", s.val_pck}, {"seconds", s.seconds}};
      *log << j.dump() << std::endl;
    }
  }
  return history;
}

std::vector<KeypointSet> predict_keypoints(Model<float>& model, const std::vector<Sample>& samples,
                                           std::size_t batch_size) {
  if (!model.spec()) throw ValueError("predict_keypoints needs a model built from a NetworkSpec");
  const NetworkSpec& net = *model.spec();
  const double stride = static_cast<double>(net.input_resolution) / net.output_resolution();
  std::vector<KeypointSet> out;
  for (std::size_t start = 0; start < samples.size(); start += batch_size) {
    const std::size_t b = std::min(batch_size, samples.size() - start);
    DenseTensor x(net.input_shape(b));
    for (std::size_t i = 0; i < b; ++i) {
      const Sample& s = samples[start + i];
      if (s.image.shape() != net.input_shape(1)) throw ShapeError("image " + to_string(s.image.shape()) +
                                                                  " does not match the network input");
      std::copy(s.image.data().begin(), s.image.data().end(), x.plane(i, 0));
    }
    for (const auto& peaks : decode_heatmaps(model.forward(x), stride)) {
      KeypointSet ks;
      for (const Peak& p : peaks) ks.push_back({p.x, p.y, true});
      out.push_back(std::move(ks));
    }
  }
  return out;
}

std::vector<std::vector<std::int32_t>> predict_segmentation(Model<float>& model, const std::vector<Sample>& samples,
                                                            std::size_t batch_size) {
  if (!model.spec()) throw ValueError("predict_segmentation needs a model built from a NetworkSpec");
  const NetworkSpec& net = *model.spec();
  std::vector<std::vector<std::int32_t>> out;
  for (std::size_t start = 0; start < samples.size(); start += batch_size) {
    const std::size_t b = std::min(batch_size, samples.size() - start);
    DenseTensor x(net.input_shape(b));
    for (std::size_t i = 0; i < b; ++i) {
      const Sample& s = samples[start + i];
      if (s.image.shape() != net.input_shape(1)) throw ShapeError("image " + to_string(s.image.shape()) +
                                                                  " does not match the network input");
      std::copy(s.image.data().begin(), s.image.data().end(), x.plane(i, 0));
    }
    const DenseTensor logits = model.forward(x);
    const Shape4 sh = logits.shape();
    const std::size_t hw = sh.h * sh.w;
    for (std::size_t i = 0; i < b; ++i) {
      std::vector<std::int32_t> mask(hw, 0);
      for (std::size_t p = 0; p < hw; ++p) {
        float best = logits.plane(i, 0)[p];
        for (std::size_t c = 1; c < sh.c; ++c) {
          const float v = logits.plane(i, c)[p];
          if (v > best) {
            best = v;
            mask[p] = static_cast<std::int32_t>(c);
          }
        }
      }
      out.push_back(std::move(mask));
    }
  }
  return out;
}

void load_training_data(const TrainConfig& cfg, std::vector<Sample>* train, std::vector<Sample>* val) {
  if (cfg.train_data.empty()) {
    ToyConfig toy = cfg.toy;
    toy.image_size = cfg.net.input_resolution;
    *train = make_toy_dataset(cfg.toy_train, cfg.net.outputs, cfg.seed, toy);
    *val = make_toy_dataset(cfg.toy_val, cfg.net.outputs, cfg.seed + 0x9e3779b97f4a7c15ULL, toy);
    return;
  }
  auto fit = [&](std::vector<Sample> v) {
    for (Sample& s : v) s = resize_sample(s, cfg.net.input_resolution);
    return v;
  };
  *train = fit(load_dataset(cfg.train_data));
  *val = cfg.val_data.empty() ? std::vector<Sample>{} : fit(load_dataset(cfg.val_data));
}

}  // namespace binloc
