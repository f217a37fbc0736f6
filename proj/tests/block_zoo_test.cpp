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

#include "binloc/blocks.hpp"

namespace binloc {
namespace {

const BlockVariant kAll[] = {BlockVariant::kBottleneck, BlockVariant::kWider, BlockVariant::kMultiScale,
                             BlockVariant::kMultiScaleNo1x1, BlockVariant::kHpm};

TEST(BlockCounts, Bottleneck) {
  EXPECT_EQ(count_params(build_bottleneck(256)), 212992u);
  EXPECT_EQ(count_params(build_bottleneck(4)), 52u);
  EXPECT_EQ(count_convs(build_bottleneck(256).graph), 3u);
}

TEST(BlockCounts, Wider) {
  EXPECT_EQ(count_params(build_wider(256)), 720896u);
  EXPECT_EQ(count_params(build_wider(2)), 44u);
  EXPECT_NEAR(static_cast<double>(count_params(build_wider(256))) / count_params(build_bottleneck(256)), 3.385, 5e-4);
}

TEST(BlockCounts, MultiScale) {
  const BlockSpec b = build_multiscale(256);
  EXPECT_EQ(count_params(b), 242688u);
  std::vector<std::size_t> concat_widths;
  for (const LayerNode& n : b.graph.nodes())
    if (n.kind == NodeKind::kConcat) concat_widths.push_back(n.channels);
  EXPECT_EQ(concat_widths, (std::vector<std::size_t>{64, 128}));
}

TEST(BlockCounts, MultiScaleWithout1x1) {
  const BlockSpec b = build_ms_no_1x1(256);
  EXPECT_EQ(count_params(b), 626688u);
  EXPECT_GT(count_params(b), count_params(build_multiscale(256)));
  EXPECT_EQ(count_convs(b.graph, 1), 0u);
  EXPECT_EQ(b.graph.node(b.graph.output_id()).channels, 256u);
}

TEST(BlockCounts, Hpm) {
  EXPECT_EQ(count_params(build_hpm(256)), 405504u);
  EXPECT_EQ(count_params(build_hpm(192)), 228096u);
  EXPECT_EQ(count_convs(build_hpm(256).graph, 1), 0u);
  const double ratio = static_cast<double>(count_params(build_hpm(192))) / count_params(build_bottleneck(256));
  EXPECT_GE(ratio, 1.0);
  EXPECT_LE(ratio, 1.15);
}

TEST(BlockCounts, BatchNormAddsTwoPerChannel) {
  // hpm(256): bn over 256, 128 and 64 channels.
  EXPECT_EQ(count_params(build_hpm(256), true), 405504u + 2u * (256 + 128 + 64));
  EXPECT_EQ(count_params(Graph{}), 0u);
}

TEST(BlockCounts, ProjectionShortcut) {
  const BlockSpec b = build_bottleneck(64, 128);
  // 64*64 + 9*64*64 + 64*128 + 64*128 projection.
  EXPECT_EQ(count_params(b), 57344u);
  EXPECT_EQ(b.graph.node(b.graph.output_id()).channels, 128u);
}

TEST(BlockBuilders, RejectBadWidths) {
  EXPECT_THROW(build_bottleneck(255), ValueError);
  EXPECT_THROW(build_multiscale(260), ValueError);
  EXPECT_THROW(build_ms_no_1x1(6), ValueError);
  EXPECT_THROW(build_hpm(250), ValueError);
  EXPECT_THROW(build_wider(0), ValueError);
  EXPECT_THROW(parse_block_variant("resnext"), ValueError);
}

TEST(BlockBuilders, VariantNamesRoundTrip) {
  for (BlockVariant v : kAll) EXPECT_EQ(parse_block_variant(to_string(v)), v);
}

TEST(BlockBuilders, PreActivationOrderAndDag) {
  for (BlockVariant v : kAll)
    for (bool bin : {true, false})
      for (bool relu_after : {true, false}) {
        BlockOptions opt;
        opt.binarized = bin;
        opt.relu_after_conv = relu_after;
        const BlockSpec b = build_block(v, 64, opt);
        EXPECT_NO_THROW(b.graph.validate()) << to_string(v);
        for (const LayerNode& n : b.graph.nodes()) {
          if (n.kind != NodeKind::kConv) continue;
          EXPECT_EQ(n.binarized, bin);
          const LayerNode& act = b.graph.node(n.inputs[0]);
          EXPECT_EQ(act.kind, bin ? NodeKind::kSign : NodeKind::kRelu);
          EXPECT_EQ(b.graph.node(act.inputs[0]).kind, NodeKind::kBatchNorm);
        }
        EXPECT_EQ(b.graph.node(b.graph.output_id()).channels, 64u);
      }
}

TEST(BlockBuilders, ValidateRejectsBareBinarizedConv) {
  Graph g;
  g.input(4);
  g.output(g.conv(0, ConvParams::square(4, 4, 3), true));
  EXPECT_THROW(g.validate(), ValueError);
}

TEST(BlockAnalysis, ShortestConvPath) {
  EXPECT_EQ(shortest_conv_path(build_hpm(256)), 1u);
  const BlockSpec hpm = build_hpm(192);
  const auto lengths = conv_path_lengths(hpm.graph);
  for (const LayerNode& n : hpm.graph.nodes()) {
    if (n.kind == NodeKind::kConv) {
      EXPECT_EQ(lengths[n.id], 1u);
    }
  }

  const BlockSpec bott = build_bottleneck(256);
  const auto bl = conv_path_lengths(bott.graph);
  std::vector<std::size_t> per_conv;
  for (const LayerNode& n : bott.graph.nodes())
    if (n.kind == NodeKind::kConv) per_conv.push_back(bl[n.id]);
  EXPECT_EQ(per_conv, (std::vector<std::size_t>{3, 2, 1}));
  EXPECT_EQ(shortest_conv_path(bott), 3u);
  EXPECT_EQ(shortest_conv_path(build_wider(256)), 3u);
  EXPECT_EQ(shortest_conv_path(build_multiscale(256)), 3u);
  EXPECT_EQ(shortest_conv_path(Graph{}), 0u);
}

TEST(BlockAnalysis, ReceptiveField) {
  EXPECT_EQ(receptive_field(build_hpm(256)), 7u);
  EXPECT_EQ(receptive_field(build_bottleneck(256)), 3u);
  EXPECT_EQ(receptive_field(build_wider(256)), 3u);
  // pool (2) -> 3x3 at stride 2 (6) -> 3x3 at stride 2 (10).
  EXPECT_EQ(receptive_field(build_multiscale(256)), 10u);
  EXPECT_GE(receptive_field(build_ms_no_1x1(256)), 10u);
}

TEST(GraphText, OneLinePerNode) {
  const BlockSpec b = build_hpm(8);
  const std::string text = b.graph.to_text();
  EXPECT_EQ(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')), b.graph.size());
  EXPECT_NE(text.find("conv 3x3 s1 p1 8->4 binary c=4 <- "), std::string::npos);
  EXPECT_NE(text.find("concat c=8 <- "), std::string::npos);
}

TEST(GraphText, InlineRemapsIds) {
  Graph g;
  const NodeId x = g.input(16);
  const NodeId y = g.inline_graph(build_hpm(16).graph, x, "hpm");
  g.output(g.inline_graph(build_hpm(16).graph, y, "hpm2"));
  EXPECT_NO_THROW(g.validate());
  EXPECT_EQ(count_params(g), 2 * count_params(build_hpm(16)));
  EXPECT_THROW(g.inline_graph(build_hpm(16).graph, 0), ValueError);  // closed graph
}

}  // namespace
}  // namespace binloc
