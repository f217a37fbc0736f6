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

#include "binloc/network.hpp"

#include <sstream>

#include "binloc/errors.hpp"
#include "binloc/keyvalue.hpp"

namespace binloc {

namespace {

constexpr std::size_t kStemChannels = 256;

std::string head_name(HeadKind h) { return h == HeadKind::kHeatmaps ? "heatmaps" : "segmentation"; }

}  // namespace

std::string NetworkSpec::to_text() const {
  std::ostringstream os;
  os << "block = " << to_string(block_variant) << '\n'
     << "channels = " << channels << '\n'
     << "hg_depth = " << hg_depth << '\n'
     << "input_resolution = " << input_resolution << '\n'
     << "head = " << head_name(head) << '\n'
     << "outputs = " << outputs << '\n'
     << "binarize = " << (binarize ? "true" : "false") << '\n'
     << "relu_after_conv = " << (relu_after_conv ? "true" : "false") << '\n'
     << "block_pool = " << (block_pool == PoolKind::kMax ? "max" : "avg") << '\n';
  return os.str();
}

NetworkSpec NetworkSpec::from_text(const std::string& text) {
  NetworkSpec s;
  for (const auto& [k, v] : parse_key_values(text)) {
    if (k == "block") {
      s.block_variant = parse_block_variant(v);
    } else if (k == "channels") {
      s.channels = parse_size(k, v);
    } else if (k == "hg_depth") {
      s.hg_depth = parse_size(k, v);
    } else if (k == "input_resolution") {
      s.input_resolution = parse_size(k, v);
    } else if (k == "head") {
      if (v == "heatmaps") s.head = HeadKind::kHeatmaps;
      else if (v == "segmentation") s.head = HeadKind::kSegmentation;
      else throw ValueError("head: expected heatmaps or segmentation, got '" + v + "'");
    } else if (k == "outputs") {
      s.outputs = parse_size(k, v);
    } else if (k == "binarize") {
      s.binarize = parse_bool(k, v);
    } else if (k == "relu_after_conv") {
      s.relu_after_conv = parse_bool(k, v);
    } else if (k == "block_pool") {
      if (v == "max") s.block_pool = PoolKind::kMax;
      else if (v == "avg") s.block_pool = PoolKind::kAvg;
      else throw ValueError("block_pool: expected max or avg, got '" + v + "'");
    } else {
      throw ValueError("unknown network key '" + k + "'");
    }
  }
  return s;
}

void validate(const NetworkSpec& spec) {
  if (spec.hg_depth == 0) throw ValueError("hg_depth must be at least 1");
  if (spec.hg_depth > 16) throw ValueError("hg_depth too large");
  if (spec.outputs == 0) throw ValueError("network needs at least one output map");
  const bool pooled_block =
      spec.block_variant == BlockVariant::kMultiScale || spec.block_variant == BlockVariant::kMultiScaleNo1x1;
  // Each hourglass level halves the map; pooled blocks need an even map at
  // the bottom level too.
  const std::size_t divisor = std::size_t{1} << (spec.hg_depth + 2 + (pooled_block ? 1 : 0));
  if (spec.input_resolution == 0 || spec.input_resolution % divisor != 0)
    throw ValueError("input_resolution " + std::to_string(spec.input_resolution) + " must be divisible by " +
                     std::to_string(divisor) + " for hg_depth " + std::to_string(spec.hg_depth));
  // Let the block builder reject unusable widths.
  build_block(spec.block_variant, spec.channels);
}

namespace {

NodeId add_block(Graph& g, NodeId x, const NetworkSpec& spec, const BlockOptions& opt, const std::string& name) {
  return g.inline_graph(build_block(spec.block_variant, spec.channels, opt).graph, x, name);
}

NodeId hourglass(Graph& g, NodeId x, std::size_t depth, const NetworkSpec& spec, const BlockOptions& opt,
                 const std::string& name) {
  const NodeId up1 = add_block(g, x, spec, opt, name + ".up1");
  const NodeId low1 = add_block(g, g.pool(x, PoolKind::kMax), spec, opt, name + ".low1");
  const NodeId low2 = depth > 1 ? hourglass(g, low1, depth - 1, spec, opt, name + ".inner")
                                : add_block(g, low1, spec, opt, name + ".low2");
  const NodeId low3 = add_block(g, low2, spec, opt, name + ".low3");
  return g.add(up1, g.upsample(low3));
}

}  // namespace

Network build_network(const NetworkSpec& spec) {
  validate(spec);
  BlockOptions opt;
  opt.binarized = spec.binarize;
  opt.relu_after_conv = spec.relu_after_conv;
  opt.pool = spec.block_pool;
  const std::size_t c = spec.channels;

  Network net{spec, Graph{}};
  Graph& g = net.graph;
  NodeId x = g.input(3, "image");
  x = g.conv(x, ConvParams::square(3, 64, 7, 2, 3), false, "stem.conv");
  x = g.relu(g.batchnorm(x, "stem.bn"));
  x = g.inline_graph(build_bottleneck(64, 128, opt).graph, x, "stem.res1");
  x = g.pool(x, PoolKind::kMax);
  x = g.inline_graph(build_bottleneck(128, 128, opt).graph, x, "stem.res2");
  x = g.inline_graph(build_bottleneck(128, kStemChannels, opt).graph, x, "stem.res3");
  if (c != kStemChannels) {
    const NodeId bn = g.batchnorm(x, "stem.transition.bn");
    x = g.conv(spec.binarize ? g.sign(bn) : g.relu(bn), ConvParams::square(kStemChannels, c, 1), spec.binarize,
               "stem.transition");
  }
  x = hourglass(g, x, spec.hg_depth, spec, opt, "hg");
  x = add_block(g, x, spec, opt, "head.res");
  const NodeId bn1 = g.batchnorm(x, "head.lin.bn");
  x = g.conv(spec.binarize ? g.sign(bn1) : g.relu(bn1), ConvParams::square(c, c, 1), spec.binarize, "head.lin");
  x = g.relu(g.batchnorm(x, "head.out.bn"));
  x = g.conv(x, ConvParams::square(c, spec.outputs, 1), false, "head.out");
  g.output(x);
  g.validate();
  return net;
}

std::uint64_t count_network_params(const NetworkSpec& spec, bool include_bn) {
  return count_params(build_network(spec).graph, include_bn);
}

ParamBreakdown param_breakdown(const Graph& g) {
  ParamBreakdown b;
  for (const LayerNode& n : g.nodes()) {
    if (n.kind == NodeKind::kBatchNorm) b.bn_channels += n.channels;
    if (n.kind != NodeKind::kConv) continue;
    if (n.binarized) {
      b.binary_weights += n.conv.weight_count();
      b.alphas += n.conv.out_channels;
      b.packed_words += n.conv.out_channels * words_for_bits(n.conv.filter_size());
    } else {
      b.real_weights += n.conv.weight_count();
    }
  }
  return b;
}

std::uint64_t memory_footprint(const Graph& g, bool packed) {
  const ParamBreakdown b = param_breakdown(g);
  if (!packed) return 4 * (b.real_weights + b.binary_weights);
  return 4 * b.real_weights + 8 * b.packed_words + 4 * b.alphas;
}

std::uint64_t memory_footprint(const NetworkSpec& spec, bool packed) {
  return memory_footprint(build_network(spec).graph, packed);
}

}  // namespace binloc
