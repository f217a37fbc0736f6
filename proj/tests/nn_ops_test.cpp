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

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "binloc/gemm.hpp"
#include "binloc/ops.hpp"
#include "oracles.hpp"

namespace binloc {
namespace {

using testing::naive_conv;
using testing::random_signs;
using testing::random_tensor;

TEST(ConvDense, OnesGiveNine) {
  const ConvParams p = ConvParams::square(1, 1, 3, 1, 0);
  const DenseTensor out = conv2d_dense(DenseTensor(Shape4{1, 1, 3, 3}, 1.0f), DenseTensor(Shape4{1, 1, 3, 3}, 1.0f), p);
  ASSERT_EQ(out.shape(), (Shape4{1, 1, 1, 1}));
  EXPECT_EQ(out[0], 9.0f);
}

TEST(ConvDense, IdentityKernel) {
  std::mt19937_64 rng(1);
  const DenseTensor x = random_tensor<float>(Shape4{2, 3, 4, 5}, rng);
  DenseTensor w(Shape4{3, 3, 1, 1});
  for (std::size_t c = 0; c < 3; ++c) w.at(c, c, 0, 0) = 1.0f;
  EXPECT_EQ(conv2d_dense(x, w, ConvParams::square(3, 3, 1)), x);
}

TEST(ConvDense, MatchesNestedLoops) {
  std::mt19937_64 rng(2);
  for (std::size_t stride : {1u, 2u})
    for (std::size_t pad : {0u, 1u}) {
      const ConvParams p = ConvParams::square(2, 3, 3, stride, pad);
      const Tensor<double> x = random_tensor<double>(Shape4{2, 2, 5, 5}, rng);
      const Tensor<double> w = random_tensor<double>(p.weight_shape(), rng);
      const Tensor<double> got = conv2d_dense(x, w, p, 0.0);
      const Tensor<double> want = naive_conv(x, w, p, 0.0);
      ASSERT_EQ(got.shape(), want.shape());
      for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-12);
    }
}

TEST(ConvDense, ShapeErrors) {
  const ConvParams p = ConvParams::square(3, 4, 3);
  EXPECT_THROW(conv2d_dense(DenseTensor(Shape4{1, 2, 5, 5}), DenseTensor(p.weight_shape()), p), ShapeError);
  EXPECT_THROW(conv2d_dense(DenseTensor(Shape4{1, 3, 5, 5}), DenseTensor(Shape4{4, 3, 1, 1}), p), ShapeError);
  EXPECT_THROW(ConvParams::square(1, 1, 5, 1, 0).out_h(3), ShapeError);
}

TEST(ConvBinary, AllPlusOne) {
  const ConvParams p = ConvParams::square(1, 1, 3, 1, 0);
  const BitPlaneTensor w = pack_bits(DenseTensor(Shape4{1, 1, 3, 3}, 1.0f));
  const DenseTensor out = conv2d_binary(binarize_activations(DenseTensor(Shape4{1, 1, 3, 3}, 1.0f)), w, p);
  EXPECT_EQ(out[0], 9.0f);
}

TEST(ConvBinary, MixedFilterAndAlpha) {
  const ConvParams p = ConvParams::square(1, 1, 3, 1, 0);
  DenseTensor signs(Shape4{1, 1, 3, 3}, {1, 1, 1, 1, -1, -1, -1, -1, -1});
  const BitActivations x = binarize_activations(DenseTensor(Shape4{1, 1, 3, 3}, 1.0f));
  BitPlaneTensor w = pack_bits(signs);
  // Dense oracle on the same +-1 tensors.
  EXPECT_EQ(naive_conv(DenseTensor(Shape4{1, 1, 3, 3}, 1.0f), signs, p, -1.0f)[0], -1.0f);
  EXPECT_EQ(conv2d_binary(x, w, p)[0], -1.0f);
  w.alphas[0] = 0.5f;
  EXPECT_EQ(conv2d_binary(x, w, p)[0], -0.5f);
}

TEST(ConvBinary, PaddingCountsAsMinusOne) {
  // 1x1 input of +1 with a 3x3 all-(+1) filter and pad 1: one +1 tap and
  // eight -1 padding taps.
  const ConvParams p = ConvParams::square(1, 1, 3, 1, 1);
  const DenseTensor out = conv2d_binary(binarize_activations(DenseTensor(Shape4{1, 1, 1, 1}, 1.0f)),
                                        pack_bits(DenseTensor(Shape4{1, 1, 3, 3}, 1.0f)), p);
  EXPECT_EQ(out[0], -7.0f);
}

TEST(ConvBinary, EqualsScaledDenseOracleOnRandomShapes) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::size_t> ch(1, 64), sp(1, 16), coin(0, 1), batch(1, 2);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t k = coin(rng) ? 3 : 1;
    const std::size_t stride = coin(rng) ? 1 : 2;
    const ConvParams p = ConvParams::square(ch(rng), ch(rng), k, stride, coin(rng) ? k / 2 : 0);
    const std::size_t h = std::max(k, sp(rng)), w = std::max(k, sp(rng));
    const DenseTensor x = random_signs(Shape4{batch(rng), p.in_channels, h, w}, rng);
    const DenseTensor latent = random_tensor<float>(p.weight_shape(), rng);
    const BitPlaneTensor wq = quantize_weights(latent, QuantizationPolicy{});
    const DenseTensor got = conv2d_binary(binarize_activations(x), wq, p);
    const DenseTensor z = naive_conv(x, unpack_bits(wq), p, -1.0f);
    ASSERT_EQ(got.shape(), z.shape());
    for (std::size_t n = 0; n < z.shape().n; ++n)
      for (std::size_t o = 0; o < z.shape().c; ++o)
        for (std::size_t q = 0; q < z.shape().plane(); ++q)
          ASSERT_EQ(got.plane(n, o)[q], wq.alphas[o] * z.plane(n, o)[q]) << "trial " << trial;
  }
}

TEST(ConvBinary, ScaleMapMultipliesEachPosition) {
  const ConvParams p = ConvParams::square(2, 1, 1);
  DenseTensor x(Shape4{1, 2, 1, 2}, {0.5f, -2.0f, 1.5f, 4.0f});
  const DenseTensor k = activation_scale_map(x, p);
  ASSERT_EQ(k.shape(), (Shape4{1, 1, 1, 2}));
  EXPECT_FLOAT_EQ(k[0], 1.0f);  // (0.5 + 1.5) / 2
  EXPECT_FLOAT_EQ(k[1], 3.0f);  // (2 + 4) / 2
  const DenseTensor out = conv2d_binary(binarize_activations(x), pack_bits(DenseTensor(Shape4{1, 2, 1, 1}, 1.0f)), p, &k);
  EXPECT_FLOAT_EQ(out[0], 2.0f);   // (+1 + 1) * 1
  EXPECT_FLOAT_EQ(out[1], 0.0f);   // (-1 + 1) * 3
}

TEST(Im2col, OneByOneIsReshape) {
  DenseTensor x(Shape4{1, 1, 2, 2}, {1, 2, 3, 4});
  const Matrix<float> cols = im2col(x, ConvParams::square(1, 1, 1));
  ASSERT_EQ(cols.rows, 4u);
  ASSERT_EQ(cols.cols, 1u);
  EXPECT_EQ(cols.data, (std::vector<float>{1, 2, 3, 4}));
}

TEST(Im2col, Col2imIsAdjoint) {
  // <im2col(x), C> == <x, col2im(C)> for any x, C.
  std::mt19937_64 rng(4);
  const ConvParams p = ConvParams::square(3, 2, 3, 2, 1);
  const Tensor<double> x = random_tensor<double>(Shape4{2, 3, 7, 6}, rng);
  const Matrix<double> cols = im2col(x, p);
  Matrix<double> c(cols.rows, cols.cols);
  for (auto& v : c.data) v = std::uniform_real_distribution<double>(-1, 1)(rng);
  double lhs = 0, rhs = 0;
  for (std::size_t i = 0; i < c.data.size(); ++i) lhs += cols.data[i] * c.data[i];
  const Tensor<double> back = col2im(c, p, x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) rhs += x[i] * back[i];
  EXPECT_NEAR(lhs, rhs, 1e-9);
}

TEST(GemmPopcount, ReproducesXnorDotScalars) {
  BitMatrix a(1, 3), b(1, 3);
  a.set(0, 0), a.set(0, 1);
  b.set(0, 0);
  EXPECT_EQ(gemm_popcount(a, b)[0], 1);
  BitMatrix c(1, 8), d(1, 8);
  for (std::size_t i : {0u, 2u, 4u, 6u}) c.set(0, i);
  for (std::size_t i : {0u, 1u, 4u, 5u}) d.set(0, i);
  EXPECT_EQ(gemm_popcount(c, d)[0], 0);
}

TEST(GemmPopcount, MatchesIntegerGemm) {
  std::mt19937_64 rng(5);
  for (auto [m, n, k] : {std::tuple{64u, 64u, 128u}, {7u, 5u, 65u}, {13u, 33u, 2304u}, {1u, 1u, 1u}}) {
    std::vector<int> a(m * k), b(n * k);
    BitMatrix pa(m, k), pb(n, k);
    for (std::size_t i = 0; i < a.size(); ++i) {
      a[i] = rng() & 1u ? 1 : -1;
      if (a[i] > 0) pa.set(i / k, i % k);
    }
    for (std::size_t i = 0; i < b.size(); ++i) {
      b[i] = rng() & 1u ? 1 : -1;
      if (b[i] > 0) pb.set(i / k, i % k);
    }
    const auto want = testing::naive_sign_gemm(a, b, m, n, k);
    const auto got = gemm_popcount(pa, pb);
    for (std::size_t i = 0; i < want.size(); ++i) ASSERT_EQ(got[i], want[i]);
  }
}

TEST(GemmPopcount, MismatchedRowLengthThrows) {
  EXPECT_THROW(gemm_popcount(BitMatrix(2, 10), BitMatrix(2, 11)), ShapeError);
}

TEST(Gemm, EigenAndReferenceAgreeWithLoops) {
  std::mt19937_64 rng(6);
  const std::size_t m = 17, n = 23, k = 31;
  std::vector<double> a(m * k), b(k * n);
  for (auto& v : a) v = std::uniform_real_distribution<double>(-1, 1)(rng);
  for (auto& v : b) v = std::uniform_real_distribution<double>(-1, 1)(rng);
  std::vector<double> want(m * n, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t p = 0; p < k; ++p) want[i * n + j] += a[i * k + p] * b[p * n + j];

  std::vector<double> c(m * n, 0.0);
  gemm<double>(Transpose::kNo, Transpose::kNo, m, n, k, 1.0, a.data(), k, b.data(), n, 0.0, c.data(), n);
  for (std::size_t i = 0; i < c.size(); ++i) EXPECT_NEAR(c[i], want[i], 1e-12);

  // Same product from transposed storage of both operands.
  std::vector<double> at(k * m), bt(n * k);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t p = 0; p < k; ++p) at[p * m + i] = a[i * k + p];
  for (std::size_t p = 0; p < k; ++p)
    for (std::size_t j = 0; j < n; ++j) bt[j * k + p] = b[p * n + j];
  gemm<double>(Transpose::kYes, Transpose::kYes, m, n, k, 1.0, at.data(), m, bt.data(), k, 0.0, c.data(), n);
  for (std::size_t i = 0; i < c.size(); ++i) EXPECT_NEAR(c[i], want[i], 1e-12);

  std::vector<float> af(a.begin(), a.end()), bf(b.begin(), b.end()), cf(m * n);
  gemm_reference(m, n, k, af.data(), bf.data(), cf.data());
  for (std::size_t i = 0; i < cf.size(); ++i) EXPECT_NEAR(cf[i], want[i], 1e-4);
}

TEST(Pool, ConstantInputIsFixedPoint) {
  const DenseTensor x(Shape4{1, 2, 4, 4}, 0.25f);
  EXPECT_EQ(maxpool2d(x), DenseTensor(Shape4{1, 2, 2, 2}, 0.25f));
  EXPECT_EQ(avgpool2d(x), DenseTensor(Shape4{1, 2, 2, 2}, 0.25f));
}

TEST(Pool, TwoByTwoDefinition) {
  const DenseTensor x(Shape4{1, 1, 2, 2}, {1, 2, 3, 4});
  EXPECT_EQ(maxpool2d(x)[0], 4.0f);
  EXPECT_EQ(avgpool2d(x)[0], 2.5f);
}

TEST(Pool, SignWindowsEnumeration) {
  std::set<float> max_values, avg_values;
  for (unsigned mask = 0; mask < 16; ++mask) {
    DenseTensor x(Shape4{1, 1, 2, 2});
    for (std::size_t i = 0; i < 4; ++i) x[i] = (mask >> i) & 1u ? 1.0f : -1.0f;
    max_values.insert(maxpool2d(x)[0]);
    avg_values.insert(avgpool2d(x)[0]);
  }
  EXPECT_EQ(max_values, (std::set<float>{-1.0f, 1.0f}));
  EXPECT_EQ(avg_values, (std::set<float>{-1.0f, -0.5f, 0.0f, 0.5f, 1.0f}));
}

TEST(Pool, OddSizesFloorAndZeroWindowThrows) {
  EXPECT_EQ(maxpool2d(DenseTensor(Shape4{1, 1, 5, 3})).shape(), (Shape4{1, 1, 2, 1}));
  EXPECT_THROW(pool2d(DenseTensor(Shape4{1, 1, 4, 4}), PoolKind::kMax, 0, 2), ValueError);
  EXPECT_THROW(pool2d(DenseTensor(Shape4{1, 1, 1, 1}), PoolKind::kAvg, 2, 2), ShapeError);
}

TEST(Pool, MaxPoolAfterNormalizedSignKeepsBothValues) {
  std::mt19937_64 rng(8);
  std::normal_distribution<float> gauss(3.0f, 5.0f);
  DenseTensor x(Shape4{8, 16, 16, 16});
  for (auto& v : x.data()) v = gauss(rng);
  BatchNormParams<float> bn(16);
  const DenseTensor pooled = maxpool2d(sign_act(batchnorm(x, bn, BatchNormMode::kTrain)));
  const auto plus = std::count(pooled.data().begin(), pooled.data().end(), 1.0f);
  const double frac = static_cast<double>(plus) / static_cast<double>(pooled.size());
  EXPECT_GE(frac, 0.25);
  EXPECT_LE(frac, 0.95);
  EXPECT_LT(plus, static_cast<long>(pooled.size()));
}

TEST(BatchNorm, EvalWithIdentityParameters) {
  std::mt19937_64 rng(9);
  const DenseTensor x = random_tensor<float>(Shape4{2, 3, 4, 4}, rng);
  BatchNormParams<float> bn(3);
  const DenseTensor y = batchnorm(x, bn, BatchNormMode::kEval);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(y[i], x[i], 1e-5f);
}

TEST(BatchNorm, TrainModeNormalizesAndUpdatesRunningStats) {
  std::mt19937_64 rng(10);
  const DenseTensor x = random_tensor<float>(Shape4{4, 2, 3, 3}, rng, 2.0f, 6.0f);
  BatchNormParams<float> bn(2);
  const DenseTensor y = batchnorm(x, bn, BatchNormMode::kTrain);
  for (std::size_t c = 0; c < 2; ++c) {
    double sum = 0, sq = 0;
    for (std::size_t n = 0; n < 4; ++n)
      for (std::size_t i = 0; i < 9; ++i) {
        sum += y.plane(n, c)[i];
        sq += y.plane(n, c)[i] * y.plane(n, c)[i];
      }
    EXPECT_NEAR(sum / 36, 0.0, 1e-5);
    EXPECT_NEAR(sq / 36, 1.0, 1e-3);
    EXPECT_GT(bn.running_mean[c], 0.1f);  // moved 10% of the way towards ~4
    EXPECT_LT(bn.running_mean[c], 0.7f);
  }
  EXPECT_THROW(batchnorm(x, bn = BatchNormParams<float>(3), BatchNormMode::kEval), ShapeError);
}

TEST(Activations, Definitions) {
  const DenseTensor x(Shape4{1, 1, 1, 4}, {-3.0f, 2.0f, 0.0f, -0.5f});
  EXPECT_EQ(relu(x).data()[0], 0.0f);
  EXPECT_EQ(relu(x).data()[1], 2.0f);
  EXPECT_EQ(sign_act(x), DenseTensor(Shape4{1, 1, 1, 4}, {-1.0f, 1.0f, 1.0f, -1.0f}));
}

TEST(Activations, SignStraightThroughMask) {
  const DenseTensor x(Shape4{1, 1, 1, 5}, {0.5f, 2.0f, -1.0f, 1.0f, -1.5f});
  const DenseTensor g(Shape4{1, 1, 1, 5}, {3.0f, 3.0f, 3.0f, 3.0f, 3.0f});
  EXPECT_EQ(sign_backward(g, x), DenseTensor(Shape4{1, 1, 1, 5}, {3.0f, 0.0f, 3.0f, 3.0f, 0.0f}));
}

TEST(Upsample, ReplicatesValue) {
  EXPECT_EQ(upsample_nearest(DenseTensor(Shape4{1, 1, 1, 1}, 7.0f)), DenseTensor(Shape4{1, 1, 2, 2}, 7.0f));
}

TEST(ConcatAdd, ChannelBookkeepingAndErrors) {
  const DenseTensor a(Shape4{2, 3, 2, 2}, 1.0f), b(Shape4{2, 5, 2, 2}, 2.0f);
  const DenseTensor c = concat_channels<float>({&a, &b});
  EXPECT_EQ(c.shape(), (Shape4{2, 8, 2, 2}));
  EXPECT_EQ(c.at(1, 2, 1, 1), 1.0f);
  EXPECT_EQ(c.at(1, 3, 0, 0), 2.0f);
  const auto parts = split_channels(c, {3, 5});
  EXPECT_EQ(parts[0], a);
  EXPECT_EQ(parts[1], b);
  const DenseTensor d(Shape4{2, 3, 4, 4});
  EXPECT_THROW(concat_channels<float>({&a, &d}), ShapeError);
  EXPECT_THROW(add(a, b), ShapeError);
  EXPECT_EQ(add(a, a), DenseTensor(Shape4{2, 3, 2, 2}, 2.0f));
}

// Backward passes against central differences, in double precision.
double dot(const Tensor<double>& a, const Tensor<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

TEST(Backward, ConvMatchesFiniteDifferences) {
  std::mt19937_64 rng(12);
  const ConvParams p = ConvParams::square(2, 3, 3, 2, 1);
  Tensor<double> x = random_tensor<double>(Shape4{2, 2, 5, 6}, rng);
  Tensor<double> w = random_tensor<double>(p.weight_shape(), rng);
  const Tensor<double> probe = random_tensor<double>(p.output_shape(x.shape()), rng);
  for (double pad : {0.0, -1.0}) {
    Tensor<double> gx, gw;
    conv2d_dense_backward(x, w, p, probe, pad, &gx, &gw);
    const double h = 1e-6;
    for (std::size_t i = 0; i < x.size(); i += 7) {
      const double keep = x[i];
      x[i] = keep + h;
      const double up = dot(conv2d_dense(x, w, p, pad), probe);
      x[i] = keep - h;
      const double dn = dot(conv2d_dense(x, w, p, pad), probe);
      x[i] = keep;
      EXPECT_NEAR(gx[i], (up - dn) / (2 * h), 1e-7);
    }
    for (std::size_t i = 0; i < w.size(); i += 3) {
      const double keep = w[i];
      w[i] = keep + h;
      const double up = dot(conv2d_dense(x, w, p, pad), probe);
      w[i] = keep - h;
      const double dn = dot(conv2d_dense(x, w, p, pad), probe);
      w[i] = keep;
      EXPECT_NEAR(gw[i], (up - dn) / (2 * h), 1e-7);
    }
  }
}

TEST(Backward, BatchNormTrainMatchesFiniteDifferences) {
  std::mt19937_64 rng(13);
  Tensor<double> x = random_tensor<double>(Shape4{3, 2, 3, 3}, rng);
  BatchNormParams<double> bn(2);
  bn.gamma = {1.3, -0.7};
  bn.beta = {0.2, 0.1};
  const Tensor<double> probe = random_tensor<double>(x.shape(), rng);
  BatchNormCache<double> cache;
  batchnorm(x, bn, BatchNormMode::kTrain, &cache);
  std::vector<double> gg(2, 0.0), gb(2, 0.0);
  const Tensor<double> gx = batchnorm_backward(probe, bn, cache, &gg, &gb);
  const double h = 1e-6;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + h;
    const double up = dot(batchnorm(x, bn, BatchNormMode::kTrain), probe);
    x[i] = keep - h;
    const double dn = dot(batchnorm(x, bn, BatchNormMode::kTrain), probe);
    x[i] = keep;
    EXPECT_NEAR(gx[i], (up - dn) / (2 * h), 1e-6);
  }
  for (std::size_t c = 0; c < 2; ++c) {
    const double keep = bn.gamma[c];
    bn.gamma[c] = keep + h;
    const double up = dot(batchnorm(x, bn, BatchNormMode::kTrain), probe);
    bn.gamma[c] = keep - h;
    const double dn = dot(batchnorm(x, bn, BatchNormMode::kTrain), probe);
    bn.gamma[c] = keep;
    EXPECT_NEAR(gg[c], (up - dn) / (2 * h), 1e-6);
  }
}

TEST(Backward, PoolingAndUpsampleAreAdjoint) {
  std::mt19937_64 rng(14);
  const Tensor<double> x = random_tensor<double>(Shape4{2, 3, 6, 6}, rng);
  for (PoolKind kind : {PoolKind::kMax, PoolKind::kAvg}) {
    std::vector<std::uint32_t> argmax;
    const Tensor<double> y = pool2d(x, kind, 2, 2, &argmax);
    const Tensor<double> g = random_tensor<double>(y.shape(), rng);
    const Tensor<double> gx = pool2d_backward(g, x.shape(), kind, 2, 2, argmax);
    if (kind == PoolKind::kAvg) {
      EXPECT_NEAR(dot(y, g), dot(x, gx), 1e-12);
    } else {
      // Max pooling is linear in the selected entries.
      EXPECT_NEAR(dot(y, g), dot(x, gx), 1e-12);
    }
  }
  const Tensor<double> u = upsample_nearest(x);
  const Tensor<double> gu = random_tensor<double>(u.shape(), rng);
  EXPECT_NEAR(dot(u, gu), dot(x, upsample_nearest_backward(gu)), 1e-12);
}

}  // namespace
}  // namespace binloc
