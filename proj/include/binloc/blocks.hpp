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

#ifndef BINLOC_BLOCKS_HPP_
#define BINLOC_BLOCKS_HPP_

#include <cstddef>
#include <cstdint>
#include <string>

#include "binloc/graph.hpp"

namespace binloc {

enum class BlockVariant { kBottleneck, kWider, kMultiScale, kMultiScaleNo1x1, kHpm };

/// CLI spellings: bottleneck, wider, ms, ms-no1x1, hpm.
std::string to_string(BlockVariant v);
BlockVariant parse_block_variant(const std::string& s);

struct BlockOptions {
  bool binarized = true;
  /// Adds a ReLU after every conv of the block.
  bool relu_after_conv = false;
  PoolKind pool = PoolKind::kMax;
};

struct BlockSpec {
  BlockVariant variant = BlockVariant::kBottleneck;
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  bool has_skip = true;
  BlockOptions options;
  Graph graph;
};

BlockSpec build_bottleneck(std::size_t c, const BlockOptions& opt = {});
/// Bottleneck with a 1x1 projection on the shortcut when in != out. The
/// projection shares the block-input bn -> sign.
BlockSpec build_bottleneck(std::size_t in, std::size_t out, const BlockOptions& opt = {});
BlockSpec build_wider(std::size_t c, const BlockOptions& opt = {});
BlockSpec build_multiscale(std::size_t c, const BlockOptions& opt = {});
BlockSpec build_ms_no_1x1(std::size_t c, const BlockOptions& opt = {});
BlockSpec build_hpm(std::size_t c, const BlockOptions& opt = {});
BlockSpec build_block(BlockVariant v, std::size_t c, const BlockOptions& opt = {});

/// Sum of kh * kw * ci * co over convs, plus 2 * channels per batch norm
/// when include_bn is set.
std::uint64_t count_params(const Graph& g, bool include_bn = false);
inline std::uint64_t count_params(const BlockSpec& b, bool include_bn = false) {
  return count_params(b.graph, include_bn);
}

std::size_t count_convs(const Graph& g, std::size_t kernel = 0);

/// For every conv, the fewest convs met (itself included) on a path from it to
/// the output; returns the largest of these. 0 for a graph without convs.
std::size_t shortest_conv_path(const Graph& g);
/// Per-conv values behind shortest_conv_path, indexed like g.nodes().
std::vector<std::size_t> conv_path_lengths(const Graph& g);
inline std::size_t shortest_conv_path(const BlockSpec& b) { return shortest_conv_path(b.graph); }

/// Largest receptive field, in input pixels, over input-to-output paths.
std::size_t receptive_field(const Graph& g);
inline std::size_t receptive_field(const BlockSpec& b) { return receptive_field(b.graph); }

}  // namespace binloc

#endif  // BINLOC_BLOCKS_HPP_
