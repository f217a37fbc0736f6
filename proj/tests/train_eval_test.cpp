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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "binloc/augment.hpp"
#include "binloc/dataset_io.hpp"
#include "binloc/heatmap.hpp"
#include "binloc/losses.hpp"
#include "binloc/metrics.hpp"
#include "binloc/optim.hpp"
#include "binloc/toy.hpp"
#include "binloc/trainer.hpp"
#include "oracles.hpp"

namespace binloc {
namespace {

using testing::random_tensor;

TEST(Heatmap, PeakAndFalloff) {
  const DenseTensor m = gaussian_heatmap(Keypoint{10.2, 5.4, true}, 16, 1.0);
  EXPECT_EQ(m[5 * 16 + 10], 1.0f);
  EXPECT_NEAR(m[5 * 16 + 11], 0.60653066, 1e-6);
  EXPECT_NEAR(m[6 * 16 + 11], std::exp(-1.0), 1e-6);
}

TEST(Heatmap, InvisibleAndOutside) {
  const DenseTensor hidden = gaussian_heatmap(Keypoint{3, 3, false}, 8, 1.0);
  for (float v : hidden.data()) EXPECT_EQ(v, 0.0f);
  bool outside = false;
  const DenseTensor m = gaussian_heatmap(Keypoint{8.6, 3, true}, 8, 1.0, &outside);
  EXPECT_TRUE(outside);
  for (float v : m.data()) EXPECT_EQ(v, 0.0f);
  EXPECT_THROW(gaussian_heatmap(Keypoint{1, 1, true}, 8, 0.0), ValueError);
}

TEST(Heatmap, DecodeRecoversRenderedKeypoints) {
  // Keypoints on grid centres come back exactly.
  std::vector<Keypoint> kps = {{grid_to_image(3, 4), grid_to_image(7, 4), true},
                               {grid_to_image(12, 4), grid_to_image(1, 4), true}};
  const auto peaks = decode_heatmaps(render_heatmaps(kps, 16, 4.0, 1.0), 4.0);
  ASSERT_EQ(peaks.size(), 1u);
  for (std::size_t k = 0; k < 2; ++k) {
    EXPECT_DOUBLE_EQ(peaks[0][k].x, kps[k].x);
    EXPECT_DOUBLE_EQ(peaks[0][k].y, kps[k].y);
    EXPECT_EQ(peaks[0][k].confidence, 1.0);
  }
}

TEST(Losses, ClosedForms) {
  const DenseTensor t(Shape4{2, 3, 4, 4}, 0.25f);
  const LossResult<float> same = loss_l2(t, t);
  EXPECT_EQ(same.value, 0.0);
  for (float g : same.grad.data()) EXPECT_EQ(g, 0.0f);
  const DenseTensor zero(Shape4{2, 3, 4, 4});
  EXPECT_NEAR(loss_sigmoid_ce(zero, zero).value, std::log(2.0), 1e-12);
  std::vector<std::int32_t> mask(2 * 16);
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = static_cast<std::int32_t>(i % 3);
  EXPECT_NEAR(loss_multiclass_ce(zero, mask).value, std::log(3.0), 1e-12);
}

TEST(Losses, Errors) {
  DenseTensor a(Shape4{1, 1, 2, 2}), b(Shape4{1, 1, 2, 3});
  EXPECT_THROW(loss_l2(a, b), ShapeError);
  a[0] = std::nanf("");
  EXPECT_THROW(loss_l2(a, a), ValueError);
  EXPECT_THROW(loss_sigmoid_ce(DenseTensor(Shape4{1, 1, 1, 1}), DenseTensor(Shape4{1, 1, 1, 1}, 2.0f)), ValueError);
  EXPECT_THROW(loss_multiclass_ce(DenseTensor(Shape4{1, 2, 1, 1}), std::vector<std::int32_t>{2}), ValueError);
  EXPECT_THROW(loss_multiclass_ce(DenseTensor(Shape4{1, 2, 1, 2}), std::vector<std::int32_t>{0}), ShapeError);
  EXPECT_THROW(parse_loss_kind("hinge"), ValueError);
}

TEST(Losses, GradientsMatchFiniteDifferences) {
  std::mt19937_64 rng(1);
  Tensor<double> x = random_tensor<double>(Shape4{2, 3, 2, 2}, rng, -3.0, 3.0);
  const Tensor<double> t = random_tensor<double>(x.shape(), rng, 0.0, 1.0);
  std::vector<std::int32_t> mask(2 * 4);
  for (auto& m : mask) m = static_cast<std::int32_t>(rng() % 3);
  const double h = 1e-6;
  for (int kind = 0; kind < 3; ++kind) {
    auto eval = [&](const Tensor<double>& p) {
      if (kind == 0) return loss_l2(p, t);
      if (kind == 1) return loss_sigmoid_ce(p, t);
      return loss_multiclass_ce(p, mask);
    };
    const Tensor<double> g = eval(x).grad;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double keep = x[i];
      x[i] = keep + h;
      const double up = eval(x).value;
      x[i] = keep - h;
      const double dn = eval(x).value;
      x[i] = keep;
      EXPECT_NEAR(g[i], (up - dn) / (2 * h), 1e-8) << "loss " << kind;
    }
  }
}

std::vector<ParamRef<double>> one_param(std::vector<double>& w, std::vector<double>& g, bool clip) {
  return {ParamRef<double>{"w", std::span<double>(w), std::span<double>(g), clip}};
}

TEST(RmsProp, ZeroGradientLeavesWeights) {
  std::vector<double> w = {0.3, -2.0}, g = {0.0, 0.0};
  auto p = one_param(w, g, false);
  RmsProp<double> opt;
  for (int i = 0; i < 5; ++i) opt.step(p, 0.1);
  EXPECT_EQ(w, (std::vector<double>{0.3, -2.0}));
}

TEST(RmsProp, ConstantGradientStepApproachesLr) {
  std::vector<double> w = {0.0}, g = {0.37};
  auto p = one_param(w, g, false);
  RmsProp<double> opt;
  double prev = 0.0, last_step = 0.0;
  for (int i = 0; i < 2000; ++i) {
    opt.step(p, 1e-3);
    last_step = prev - w[0];
    prev = w[0];
  }
  // 1 - 0.99^2000 of the accumulator is saturated.
  EXPECT_NEAR(last_step, 1e-3, 1e-6);
  EXPECT_EQ(opt.steps(), 2000u);
}

TEST(RmsProp, ClipsBinarizedLatents) {
  std::vector<double> w = {1.0, -0.999}, g = {-5.0, 5.0};
  auto p = one_param(w, g, true);
  RmsProp<double> opt;
  opt.step(p, 0.5);
  EXPECT_EQ(w[0], 1.0);
  EXPECT_EQ(w[1], -1.0);
}

TEST(LrSchedule, FourGeometricDrops) {
  LrSchedule s;
  s.epochs = 100;
  EXPECT_DOUBLE_EQ(s.at(0), 2.5e-4);
  EXPECT_DOUBLE_EQ(s.at(99), 5e-5);
  std::vector<double> distinct;
  for (std::size_t e = 0; e < 100; ++e)
    if (distinct.empty() || s.at(e) != distinct.back()) distinct.push_back(s.at(e));
  ASSERT_EQ(distinct.size(), 5u);
  for (std::size_t i = 1; i < distinct.size(); ++i) EXPECT_NEAR(distinct[i] / distinct[i - 1], std::pow(0.2, 0.25), 1e-12);
}

TEST(LrSchedule, ShortRunsStartAtTheInitialRate) {
  LrSchedule s;
  s.epochs = 1;
  EXPECT_DOUBLE_EQ(s.at(0), 2.5e-4);
  s.epochs = 3;
  EXPECT_DOUBLE_EQ(s.at(0), 2.5e-4);
  EXPECT_LT(s.at(1), 2.5e-4);
  EXPECT_GT(s.at(2), 5e-5);
}

Sample toy_sample(std::uint64_t seed = 3) { return make_toy_dataset(1, 4, seed).front(); }

TEST(Augment, IdentityLeavesSampleUnchanged) {
  const Sample s = toy_sample();
  std::mt19937_64 rng(1);
  const Sample a = augment(s, AugmentConfig::identity(), rng);
  EXPECT_EQ(a.image, s.image);
  for (std::size_t k = 0; k < s.keypoints.size(); ++k) {
    EXPECT_DOUBLE_EQ(a.keypoints[k].x, s.keypoints[k].x);
    EXPECT_DOUBLE_EQ(a.keypoints[k].y, s.keypoints[k].y);
  }
}

TEST(Augment, HalfTurnTwiceRestoresKeypoints) {
  const Sample s = toy_sample();
  const Transform half{180.0, 1.0, false};
  const Sample b = apply_transform(apply_transform(s, half), half);
  for (std::size_t k = 0; k < s.keypoints.size(); ++k) {
    EXPECT_NEAR(b.keypoints[k].x, s.keypoints[k].x, 1e-9);
    EXPECT_NEAR(b.keypoints[k].y, s.keypoints[k].y, 1e-9);
    EXPECT_TRUE(b.keypoints[k].visible);
  }
  double err = 0.0;
  for (std::size_t i = 0; i < s.image.size(); ++i) err = std::max(err, std::abs(double(b.image[i]) - s.image[i]));
  EXPECT_LT(err, 1e-4);
}

TEST(Augment, FlipMirrorsAndSwaps) {
  Sample s = toy_sample();
  const Sample f = apply_transform(s, Transform{0.0, 1.0, true}, {1, 0, 3, 2});
  const double w = static_cast<double>(s.width());
  EXPECT_NEAR(f.keypoints[0].x, w - 1 - s.keypoints[1].x, 1e-9);
  EXPECT_NEAR(f.keypoints[0].y, s.keypoints[1].y, 1e-9);
  EXPECT_NEAR(f.keypoints[3].x, w - 1 - s.keypoints[2].x, 1e-9);
  for (std::size_t y = 0; y < s.height(); ++y)
    EXPECT_EQ(f.image.at(0, 1, y, 0), s.image.at(0, 1, y, s.width() - 1));
}

TEST(Augment, ConfigValidation) {
  AugmentConfig c;
  c.swap = {1, 2, 0};
  EXPECT_THROW(c.validate(3), ValueError);
  c.swap = {1, 0};
  EXPECT_THROW(c.validate(3), ValueError);
  EXPECT_NO_THROW(c.validate(2));
  c.scale_min = 0.0;
  EXPECT_THROW(c.validate(2), ValueError);
}

TEST(Augment, ImagesAndKeypointsStayConsistent) {
  // Re-rendering blobs at the transformed keypoints reproduces the
  // transformed image up to interpolation error.
  const auto data = make_toy_dataset(8, 4, 11);
  AugmentConfig cfg;
  cfg.hflip = true;
  std::mt19937_64 rng(5);
  for (const Sample& s : data) {
    const Transform t = sample_transform(cfg, rng);
    const Sample a = apply_transform(s, t);
    ToyConfig toy;
    toy.blob_sigma = 2.0 * t.scale;
    std::vector<Keypoint> kps = a.keypoints;
    for (Keypoint& k : kps) k.visible = true;  // off-image blobs still leave tails
    const DenseTensor ref = render_toy_image(kps, toy);
    double err = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) err = std::max(err, std::abs(double(ref[i]) - a.image[i]));
    EXPECT_LT(err, 0.08) << "angle " << t.angle_deg << " scale " << t.scale;
  }
}

TEST(Toy, DeterministicPerSeedAndIndex) {
  const auto a = make_toy_dataset(5, 3, 42), b = make_toy_dataset(8, 3, 42), c = make_toy_dataset(5, 3, 43);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(a[i].image, b[i].image);
  EXPECT_NE(a[0].image, c[0].image);
  for (const Sample& s : a) {
    EXPECT_EQ(s.keypoints.size(), 3u);
    for (const Keypoint& k : s.keypoints) {
      EXPECT_GE(k.x, 6.0);
      EXPECT_LE(k.x, 57.0);
      // Each blob shows its own colour at its centre.
      const auto col = toy_color(&k - s.keypoints.data(), 3);
      const std::size_t px = static_cast<std::size_t>(std::lround(k.x)), py = static_cast<std::size_t>(std::lround(k.y));
      for (std::size_t ch = 0; ch < 3; ++ch) EXPECT_NEAR(s.image.at(0, ch, py, px), col[ch], 0.15f);
    }
  }
}

TEST(Metrics, PckhInclusiveBoundary) {
  std::vector<KeypointSet> gts = {{{10, 10, true}, {20, 20, true}}};
  std::vector<KeypointSet> preds = {{{15, 10, true}, {20, 25, true}}};
  const PckResult r = pckh(preds, gts, {10.0});
  EXPECT_EQ(r.mean, 100.0);
  const PckResult strict = pckh(preds, gts, {9.9});
  EXPECT_EQ(strict.mean, 0.0);
  EXPECT_EQ(pckh(gts, gts, {1.0}).per_joint, (std::vector<double>{100.0, 100.0}));
}

TEST(Metrics, PckhSkipsInvisibleJoints) {
  std::vector<KeypointSet> gts = {{{0, 0, true}, {0, 0, false}}, {{0, 0, true}, {0, 0, true}}};
  std::vector<KeypointSet> preds = {{{0, 0, true}, {50, 0, true}}, {{50, 0, true}, {0, 0, true}}};
  const PckResult r = pckh(preds, gts, {10.0, 10.0});
  EXPECT_EQ(r.per_joint, (std::vector<double>{50.0, 100.0}));
  EXPECT_EQ(r.mean, 75.0);
}

TEST(Metrics, Nme) {
  std::vector<KeypointSet> gts = {{{0, 0, true}, {10, 10, true}}};
  std::vector<KeypointSet> preds = {{{1, 0, true}, {10, 13, true}}};
  EXPECT_DOUBLE_EQ(nme(preds, gts, {100.0}), 2.0);
  EXPECT_EQ(nme(gts, gts, {5.0}), 0.0);
  EXPECT_DOUBLE_EQ(bbox_norm(BoundingBox{0, 0, 4, 9}), 6.0);
  EXPECT_THROW(nme(preds, gts, {0.0}), ValueError);
}

TEST(Metrics, SegmentationDefinitions) {
  // gt:   0 0 1 1 ; pred: 0 1 1 1  (class 2 absent everywhere)
  const SegMetrics m = seg_metrics({{0, 1, 1, 1}}, {{0, 0, 1, 1}}, 3);
  EXPECT_DOUBLE_EQ(m.pixel_acc, 0.75);
  EXPECT_DOUBLE_EQ(m.mean_acc, (0.5 + 1.0) / 2);
  EXPECT_DOUBLE_EQ(m.mean_iu, (0.5 + 2.0 / 3.0) / 2);
  const SegMetrics p = seg_metrics({{0, 2, 1}}, {{0, 2, 1}}, 3);
  EXPECT_EQ(p.pixel_acc, 1.0);
  EXPECT_EQ(p.mean_iu, 1.0);
  EXPECT_THROW(seg_metrics({{0, 3}}, {{0, 1}}, 3), ValueError);
}

TEST(DatasetIo, RoundTripThroughDisk) {
  const auto dir = std::filesystem::temp_directory_path() / "binloc_io_test";
  std::filesystem::remove_all(dir);
  auto data = make_toy_dataset(3, 2, 9);
  data[1].mask.assign(16 * 16, 0);
  data[1].mask[17] = 4;
  data[1].mask_h = data[1].mask_w = 16;
  data[2].keypoints[1].visible = false;
  save_dataset(dir.string(), data);
  const auto back = load_dataset((dir / "annotations.jsonl").string());
  ASSERT_EQ(back.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t p = 0; p < data[i].image.size(); ++p) ASSERT_NEAR(back[i].image[p], data[i].image[p], 0.5 / 255 + 1e-6);
    for (std::size_t k = 0; k < 2; ++k) {
      EXPECT_DOUBLE_EQ(back[i].keypoints[k].x, data[i].keypoints[k].x);
      EXPECT_EQ(back[i].keypoints[k].visible, data[i].keypoints[k].visible);
    }
    EXPECT_EQ(back[i].head_size, 64.0);
  }
  EXPECT_EQ(back[1].mask, data[1].mask);
  EXPECT_TRUE(back[0].mask.empty());
  std::filesystem::remove_all(dir);
}

TEST(DatasetIo, RejectsBrokenFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "binloc_io_bad";
  std::filesystem::create_directories(dir);
  {
    std::ofstream f(dir / "a.ppm", std::ios::binary);
    f << "P6\n4 4\n255\nxx";
  }
  EXPECT_THROW(read_pnm((dir / "a.ppm").string()), FormatError);
  {
    std::ofstream f(dir / "ann.jsonl");
    f << "{\"image\": 3}\n";
  }
  EXPECT_THROW(load_dataset((dir / "ann.jsonl").string()), FormatError);
  EXPECT_THROW(read_pnm((dir / "missing.ppm").string()), FormatError);
  std::filesystem::remove_all(dir);
}

TEST(DatasetIo, ResizeScalesKeypoints) {
  Sample s = make_toy_dataset(1, 2, 4, ToyConfig{128, 4.0, 12.0, 0.0}).front();
  const Sample r = resize_sample(s, 64);
  EXPECT_EQ(r.image.shape(), (Shape4{1, 3, 64, 64}));
  EXPECT_NEAR(r.keypoints[0].x, (s.keypoints[0].x + 0.5) / 2 - 0.5, 1e-12);
  EXPECT_EQ(r.head_size, 64.0);
}

TEST(TrainConfigParsing, KeysAndErrors) {
  const TrainConfig c = TrainConfig::from_key_values(parse_key_values(
      "block = hpm\nchannels = 192\nhg_depth = 2\ninput_resolution = 64\noutputs = 4\n"
      "loss = sigmoid_ce\nepochs = 12\nlr_initial = 1e-3\nswap = 1,0,3,2\naugment = true\n"));
  EXPECT_EQ(c.net.block_variant, BlockVariant::kHpm);
  EXPECT_EQ(c.net.channels, 192u);
  EXPECT_EQ(c.loss, LossKind::kSigmoidCE);
  EXPECT_EQ(c.lr.epochs, 12u);
  EXPECT_EQ(c.augmentation.swap, (std::vector<std::size_t>{1, 0, 3, 2}));
  EXPECT_EQ(c.toy.image_size, 64u);
  EXPECT_THROW(TrainConfig::from_key_values(parse_key_values("epochz = 3\n")), ValueError);
  EXPECT_THROW(TrainConfig::from_key_values(parse_key_values("outputs = 3\nswap = 1,0\n")), ValueError);
  EXPECT_THROW(TrainConfig::from_key_values(parse_key_values("loss = multiclass_ce\n")), ValueError);
  EXPECT_THROW(parse_key_values("no equals sign\n"), ValueError);
}

// Two-conv all-real network: conv3x3 -> bn -> relu -> conv1x1, L2 loss.
TEST(Backward, RealMicroNetworkMatchesFiniteDifferences) {
  Graph g;
  g.input(2);
  NodeId x = g.conv(0, ConvParams::square(2, 3, 3), false);
  x = g.relu(g.batchnorm(x));
  g.output(g.conv(x, ConvParams::square(3, 2, 1), false));
  Model<double> m(g, 21);
  std::mt19937_64 rng(22);
  const Tensor<double> in = random_tensor<double>(Shape4{3, 2, 5, 5}, rng);
  const Tensor<double> target = random_tensor<double>(Shape4{3, 2, 5, 5}, rng);
  auto loss = [&] { return loss_l2(m.forward(in, BatchNormMode::kTrain), target); };
  m.zero_grad();
  m.backward(loss().grad);
  double worst = 0.0;
  for (auto& p : m.parameters()) {
    const std::vector<double> analytic(p.grad.begin(), p.grad.end());
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double keep = p.value[i], h = 1e-5;
      p.value[i] = keep + h;
      const double up = loss().value;
      p.value[i] = keep - h;
      const double dn = loss().value;
      p.value[i] = keep;
      const double fd = (up - dn) / (2 * h);
      const double rel = std::abs(fd - analytic[i]) / std::max(1e-6, std::abs(fd) + std::abs(analytic[i]));
      worst = std::max(worst, rel);
    }
  }
  EXPECT_LT(worst, 1e-4);
}

TEST(Backward, SignStraightThroughPerElement) {
  Graph g;
  g.input(1);
  g.output(g.sign(0));
  Model<double> m(g, 1);
  const Tensor<double> x(Shape4{1, 1, 1, 6}, {0.5, 2.0, -0.3, -1.0, 1.0, -7.0});
  m.forward(x, BatchNormMode::kTrain);
  const Tensor<double> gx = m.backward(Tensor<double>(x.shape(), 2.0));
  EXPECT_EQ(gx, Tensor<double>(x.shape(), {2.0, 0.0, 2.0, 2.0, 2.0, 0.0}));
}

TEST(Backward, BinarizedConvWeightGradient) {
  // out = alpha(W) * conv(sign(x), S) with S = sign(W) and padding -1.
  // Expected: dW_k = dL/dS_k + sign(W_k) * dL/dalpha / n.
  Graph g;
  g.input(2);
  const NodeId s = g.sign(g.batchnorm(0));
  g.output(g.conv(s, ConvParams::square(2, 2, 3), true));
  const NodeId conv = g.output_id() - 1;
  const ConvParams p = g.node(conv).conv;
  Model<double> m(g, 3);
  std::mt19937_64 rng(4);
  const Tensor<double> in = random_tensor<double>(Shape4{2, 2, 4, 4}, rng);
  const Tensor<double> target = random_tensor<double>(Shape4{2, 2, 4, 4}, rng);
  const LossResult<double> l = loss_l2(m.forward(in, BatchNormMode::kTrain), target);
  m.zero_grad();
  m.backward(l.grad);
  const Tensor<double>& w = m.conv_weight(conv);
  const Tensor<double>& dw = m.conv_weight_grad(conv);

  // Oracle: fresh batch norm, sign, naive convolution.
  BatchNormParams<double> bn(2);
  const Tensor<double> xs = sign_act(batchnorm(in, bn, BatchNormMode::kTrain));
  Tensor<double> signs(w.shape());
  std::vector<double> alpha(2, 0.0);
  const std::size_t n = p.filter_size();
  for (std::size_t k = 0; k < w.size(); ++k) {
    signs[k] = w[k] >= 0 ? 1.0 : -1.0;
    alpha[k / n] += std::abs(w[k]) / static_cast<double>(n);
  }
  auto loss_at = [&](const Tensor<double>& sg, const std::vector<double>& al) {
    Tensor<double> out = testing::naive_conv(xs, sg, p, -1.0);
    for (std::size_t b = 0; b < 2; ++b)
      for (std::size_t o = 0; o < 2; ++o)
        for (std::size_t q = 0; q < 16; ++q) out.plane(b, o)[q] *= al[o];
    return loss_l2(out, target).value;
  };
  const double h = 1e-6;
  std::vector<double> dalpha(2);
  for (std::size_t o = 0; o < 2; ++o) {
    auto up = alpha, dn = alpha;
    up[o] += h;
    dn[o] -= h;
    dalpha[o] = (loss_at(signs, up) - loss_at(signs, dn)) / (2 * h);
  }
  for (std::size_t k = 0; k < w.size(); ++k) {
    Tensor<double> up = signs, dn = signs;
    up[k] += h;
    dn[k] -= h;
    const double ds = (loss_at(up, alpha) - loss_at(dn, alpha)) / (2 * h);
    const double expected = (std::abs(w[k]) <= 1.0 ? ds : 0.0) + signs[k] * dalpha[k / n] / static_cast<double>(n);
    EXPECT_NEAR(dw[k], expected, 1e-7) << "weight " << k;
  }
}

TEST(Training, StepReducesLossOnFixedBatch) {
  NetworkSpec spec;
  spec.block_variant = BlockVariant::kHpm;
  spec.channels = 16;
  spec.hg_depth = 1;
  spec.input_resolution = 32;
  spec.outputs = 2;
  Model<float> model(build_network(spec), 1);
  TrainConfig cfg;
  cfg.net = spec;
  cfg.loss = LossKind::kSigmoidCE;
  Trainer tr(cfg, model);
  const auto data = make_toy_dataset(4, 2, 1, ToyConfig{32, 1.5, 4.0, 0.0});
  const Batch b = make_batch(data, {0, 1, 2, 3}, spec, cfg.loss, 1.0);
  const double first = tr.step(b, 1e-3);
  double last = first;
  for (int i = 0; i < 20; ++i) last = tr.step(b, 1e-3);
  EXPECT_LT(last, 0.7 * first);
  std::ostringstream log;
  cfg.epochs = 2;
  Trainer tr2(cfg, model);
  const auto hist = tr2.fit(data, data, &log);
  EXPECT_EQ(hist.size(), 2u);
  const std::string lines = log.str();
  EXPECT_NE(lines.find("\"train_loss\""), std::string::npos);
  EXPECT_EQ(std::count(lines.begin(), lines.end(), '\n'), 2);
}

}  // namespace
}  // namespace binloc
