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

#ifndef BINLOC_MODEL_HPP_
#define BINLOC_MODEL_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "binloc/network.hpp"
#include "binloc/ops.hpp"

namespace binloc {

/// How binarized convs run outside training. kPopcount packs activations
/// and weights and uses the xnor/popcount GEMM; kDense convolves the
/// unpacked +-1 tensors. Training always uses kDense so gradients exist.
enum class ConvEngine { kPopcount, kDense };

struct ForwardTrace {
  std::vector<Shape4> shapes;                           // per node
  std::vector<std::pair<NodeId, double>> sign_ratios;  // fraction of +1 after each sign
};

/// Trainable parameter view handed to optimizers.
template <typename T>
struct ParamRef {
  std::string name;
  std::span<T> value;
  std::span<T> grad;
  bool clip_unit = false;  // latent weight of a binarized conv
};

/// Executes a Graph. Holds conv latent weights, batch-norm state and their
/// gradients. Not thread-safe while training; eval forward passes only read.
template <typename T>
class Model {
 public:
  /// He-normal init for every conv; gamma = 1, beta = 0 for batch norm.
  Model(Graph graph, std::uint64_t seed);
  explicit Model(const Network& net, std::uint64_t seed = 0);

  const Graph& graph() const { return graph_; }
  const std::optional<NetworkSpec>& spec() const { return spec_; }

  ConvEngine engine() const { return engine_; }
  void set_engine(ConvEngine e) { engine_ = e; }

  /// kTrain uses batch statistics, updates running ones and keeps what
  /// backward() needs. kEval uses running statistics.
  Tensor<T> forward(const Tensor<T>& x, BatchNormMode mode = BatchNormMode::kEval, ForwardTrace* trace = nullptr);

  /// Accumulates parameter gradients for the last kTrain forward and returns
  /// the gradient with respect to its input. Throws ValueError without one.
  Tensor<T> backward(const Tensor<T>& grad_out);

  void zero_grad();
  std::vector<ParamRef<T>> parameters();

  Tensor<T>& conv_weight(NodeId id);
  const Tensor<T>& conv_weight(NodeId id) const;
  BatchNormParams<T>& bn(NodeId id);
  const BatchNormParams<T>& bn(NodeId id) const;
  const Tensor<T>& conv_weight_grad(NodeId id) const;

  /// Sign-quantized weights and alphas of a binarized conv as used by the
  /// forward pass.
  BitPlaneTensor binarized_weight(NodeId id) const;

 private:
  struct NodeState {
    Tensor<T> weight, weight_grad;
    BatchNormParams<T> bn;
    std::vector<T> gamma_grad, beta_grad;
  };
  struct Saved {
    Tensor<T> out;
    Tensor<T> z;  // binarized conv output before alpha
    BatchNormCache<T> bn;
    std::vector<std::uint32_t> argmax;
  };

  void check_conv(NodeId id) const;

  Graph graph_;
  std::optional<NetworkSpec> spec_;
  ConvEngine engine_ = ConvEngine::kPopcount;
  std::vector<NodeState> state_;
  std::vector<Saved> saved_;
  bool have_saved_ = false;
};

}  // namespace binloc

#endif  // BINLOC_MODEL_HPP_
