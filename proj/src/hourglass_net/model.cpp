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

#include "binloc/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "binloc/errors.hpp"

namespace binloc {

template <typename T>
Model<T>::Model(Graph graph, std::uint64_t seed) : graph_(std::move(graph)) {
  graph_.validate();
  state_.resize(graph_.size());
  std::mt19937_64 rng(seed);
  for (const LayerNode& n : graph_.nodes()) {
    NodeState& st = state_[n.id];
    if (n.kind == NodeKind::kConv) {
      st.weight = Tensor<T>(n.conv.weight_shape());
      st.weight_grad = Tensor<T>(n.conv.weight_shape());
      std::normal_distribution<double> he(0.0, std::sqrt(2.0 / static_cast<double>(n.conv.filter_size())));
      for (T& v : st.weight.data()) {
        double w = he(rng);
        if (n.binarized) w = std::clamp(w, -1.0, 1.0);
        v = static_cast<T>(w);
      }
    } else if (n.kind == NodeKind::kBatchNorm) {
      st.bn = BatchNormParams<T>(n.channels);
      st.gamma_grad.assign(n.channels, T(0));
      st.beta_grad.assign(n.channels, T(0));
    }
  }
}

template <typename T>
Model<T>::Model(const Network& net, std::uint64_t seed) : Model(net.graph, seed) {
  spec_ = net.spec;
}

template <typename T>
void Model<T>::check_conv(NodeId id) const {
  if (id >= graph_.size() || graph_.node(id).kind != NodeKind::kConv)
    throw ValueError("node " + std::to_string(id) + " is not a conv");
}

template <typename T>
Tensor<T>& Model<T>::conv_weight(NodeId id) {
  check_conv(id);
  return state_[id].weight;
}

template <typename T>
const Tensor<T>& Model<T>::conv_weight(NodeId id) const {
  check_conv(id);
  return state_[id].weight;
}

template <typename T>
const Tensor<T>& Model<T>::conv_weight_grad(NodeId id) const {
  check_conv(id);
  return state_[id].weight_grad;
}

template <typename T>
BatchNormParams<T>& Model<T>::bn(NodeId id) {
  if (id >= graph_.size() || graph_.node(id).kind != NodeKind::kBatchNorm)
    throw ValueError("node " + std::to_string(id) + " is not a batch norm");
  return state_[id].bn;
}

template <typename T>
const BatchNormParams<T>& Model<T>::bn(NodeId id) const {
  return const_cast<Model<T>*>(this)->bn(id);
}

template <typename T>
BitPlaneTensor Model<T>::binarized_weight(NodeId id) const {
  check_conv(id);
  if (!graph_.node(id).binarized) throw ValueError("conv " + std::to_string(id) + " is real-valued");
  return quantize_weights(state_[id].weight, QuantizationPolicy{});
}

namespace {

template <typename T>
void scale_channels(Tensor<T>& t, const std::vector<float>& alphas) {
  const Shape4& s = t.shape();
  for (std::size_t n = 0; n < s.n; ++n)
    for (std::size_t c = 0; c < s.c; ++c) {
      const T a = static_cast<T>(alphas[c]);
      T* p = t.plane(n, c);
      for (std::size_t i = 0; i < s.plane(); ++i) p[i] = a * p[i];
    }
}

template <typename T>
void accumulate(Tensor<T>& into, Tensor<T>&& g) {
  if (into.size() == 0) into = std::move(g);
  else add_inplace(into, g);
}

}  // namespace

template <typename T>
Tensor<T> Model<T>::forward(const Tensor<T>& x, BatchNormMode mode, ForwardTrace* trace) {
  const auto& nodes = graph_.nodes();
  if (x.shape().c != nodes.front().channels)
    throw ShapeError("model expects " + std::to_string(nodes.front().channels) + " input channels, got " +
                     to_string(x.shape()));
  if (spec_ && (x.shape().h != spec_->input_resolution || x.shape().w != spec_->input_resolution))
    throw ShapeError("network expects " + std::to_string(spec_->input_resolution) + "x" +
                     std::to_string(spec_->input_resolution) + " input, got " + to_string(x.shape()));
  require_finite(x, "model input");
  const bool train = mode == BatchNormMode::kTrain;

  // Release intermediates in eval mode once their last consumer has run.
  std::vector<std::size_t> pending(nodes.size(), 0);
  for (const LayerNode& n : nodes)
    for (NodeId in : n.inputs) ++pending[in];

  std::vector<Saved> saved(nodes.size());
  saved[0].out = x;
  if (trace != nullptr) {
    trace->shapes.assign(nodes.size(), Shape4{});
    trace->sign_ratios.clear();
    trace->shapes[0] = x.shape();
  }
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    const LayerNode& n = nodes[i];
    NodeState& st = state_[i];
    Saved& s = saved[i];
    const Tensor<T>& in = saved[n.inputs[0]].out;
    switch (n.kind) {
      case NodeKind::kConv:
        if (!n.binarized) {
          s.out = conv2d_dense(in, st.weight, n.conv);
        } else {
          const BitPlaneTensor q = binarized_weight(i);
          if (!train && engine_ == ConvEngine::kPopcount) {
            s.out = conv2d_binary<T>(binarize_activations(in), q, n.conv);
          } else {
            Tensor<T> z = conv2d_dense(in, tensor_cast<T>(unpack_bits(q)), n.conv, T(-1));
            s.out = z;
            scale_channels(s.out, q.alphas);
            if (train) s.z = std::move(z);
          }
        }
        break;
      case NodeKind::kBatchNorm:
        s.out = batchnorm(in, st.bn, mode, train ? &s.bn : nullptr);
        break;
      case NodeKind::kSign:
        s.out = sign_act(in);
        break;
      case NodeKind::kRelu:
        s.out = relu(in);
        break;
      case NodeKind::kMaxPool:
      case NodeKind::kAvgPool:
        s.out = pool2d(in, n.kind == NodeKind::kMaxPool ? PoolKind::kMax : PoolKind::kAvg, 2, 2,
                       train ? &s.argmax : nullptr);
        break;
      case NodeKind::kUpsample:
        s.out = upsample_nearest(in);
        break;
      case NodeKind::kConcat: {
        std::vector<const Tensor<T>*> parts;
        for (NodeId id : n.inputs) parts.push_back(&saved[id].out);
        s.out = concat_channels(parts);
        break;
      }
      case NodeKind::kAdd:
        s.out = add(in, saved[n.inputs[1]].out);
        break;
      case NodeKind::kOutput:
        s.out = in;
        break;
      case NodeKind::kInput:
        throw ValueError("second input node");
    }
    if (trace != nullptr) {
      trace->shapes[i] = s.out.shape();
      if (n.kind == NodeKind::kSign) {
        const auto plus = std::count_if(s.out.data().begin(), s.out.data().end(), [](T v) { return v > T(0); });
        trace->sign_ratios.emplace_back(i, s.out.size() ? static_cast<double>(plus) / s.out.size() : 0.0);
      }
    }
    if (!train)
      for (NodeId id : n.inputs)
        if (--pending[id] == 0) saved[id].out = Tensor<T>();
  }
  Tensor<T> result = saved.back().out;
  if (train) {
    saved_ = std::move(saved);
    have_saved_ = true;
  } else {
    saved_.clear();
    have_saved_ = false;
  }
  return result;
}

template <typename T>
Tensor<T> Model<T>::backward(const Tensor<T>& grad_out) {
  if (!have_saved_) throw ValueError("backward needs a preceding training-mode forward pass");
  const auto& nodes = graph_.nodes();
  if (grad_out.shape() != saved_.back().out.shape())
    throw ShapeError("output gradient " + to_string(grad_out.shape()) + " vs output " +
                     to_string(saved_.back().out.shape()));
  std::vector<Tensor<T>> grads(nodes.size());
  grads.back() = grad_out;
  for (std::size_t i = nodes.size() - 1; i >= 1; --i) {
    if (grads[i].size() == 0) continue;
    const LayerNode& n = nodes[i];
    NodeState& st = state_[i];
    const Saved& s = saved_[i];
    const Tensor<T> g = std::move(grads[i]);
    const NodeId in0 = n.inputs[0];
    const Tensor<T>& x = saved_[in0].out;
    switch (n.kind) {
      case NodeKind::kConv: {
        Tensor<T> gx, gw;
        if (!n.binarized) {
          conv2d_dense_backward(x, st.weight, n.conv, g, T(0), &gx, &gw);
          add_inplace(st.weight_grad, gw);
        } else {
          const BitPlaneTensor q = binarized_weight(i);
          Tensor<T> gz = g;
          scale_channels(gz, q.alphas);
          conv2d_dense_backward(x, tensor_cast<T>(unpack_bits(q)), n.conv, gz, T(-1), &gx, &gw);
          // alpha = mean |w|, so d alpha / d w = sign(w) / filter size.
          const Shape4& os = g.shape();
          const std::size_t fs = n.conv.filter_size();
          for (std::size_t o = 0; o < os.c; ++o) {
            double dalpha = 0.0;
            for (std::size_t b = 0; b < os.n; ++b) {
              const T* gp = g.plane(b, o);
              const T* zp = s.z.plane(b, o);
              for (std::size_t k = 0; k < os.plane(); ++k) dalpha += static_cast<double>(gp[k]) * zp[k];
            }
            const T da = static_cast<T>(dalpha / static_cast<double>(fs));
            T* dw = st.weight_grad.raw() + o * fs;
            const T* w = st.weight.raw() + o * fs;
            const T* gws = gw.raw() + o * fs;
            for (std::size_t k = 0; k < fs; ++k) {
              const T ste = std::abs(w[k]) <= T(1) ? gws[k] : T(0);
              dw[k] += ste + sign_of(w[k]) * da;
            }
          }
        }
        accumulate(grads[in0], std::move(gx));
        break;
      }
      case NodeKind::kBatchNorm:
        accumulate(grads[in0], batchnorm_backward(g, st.bn, s.bn, &st.gamma_grad, &st.beta_grad));
        break;
      case NodeKind::kSign:
        accumulate(grads[in0], sign_backward(g, x));
        break;
      case NodeKind::kRelu:
        accumulate(grads[in0], relu_backward(g, x));
        break;
      case NodeKind::kMaxPool:
      case NodeKind::kAvgPool:
        accumulate(grads[in0], pool2d_backward(g, x.shape(), n.kind == NodeKind::kMaxPool ? PoolKind::kMax
                                                                                           : PoolKind::kAvg,
                                               2, 2, s.argmax));
        break;
      case NodeKind::kUpsample:
        accumulate(grads[in0], upsample_nearest_backward(g));
        break;
      case NodeKind::kConcat: {
        std::vector<std::size_t> widths;
        for (NodeId id : n.inputs) widths.push_back(nodes[id].channels);
        auto parts = split_channels(g, widths);
        for (std::size_t k = 0; k < n.inputs.size(); ++k) accumulate(grads[n.inputs[k]], std::move(parts[k]));
        break;
      }
      case NodeKind::kAdd:
        accumulate(grads[n.inputs[1]], Tensor<T>(g));
        accumulate(grads[in0], Tensor<T>(g));
        break;
      case NodeKind::kOutput:
        accumulate(grads[in0], Tensor<T>(g));
        break;
      case NodeKind::kInput:
        break;
    }
  }
  Tensor<T> gx = std::move(grads[0]);
  if (gx.size() == 0) gx = Tensor<T>(saved_[0].out.shape());
  return gx;
}

template <typename T>
void Model<T>::zero_grad() {
  for (NodeState& st : state_) {
    st.weight_grad.fill(T(0));
    std::fill(st.gamma_grad.begin(), st.gamma_grad.end(), T(0));
    std::fill(st.beta_grad.begin(), st.beta_grad.end(), T(0));
  }
}

template <typename T>
std::vector<ParamRef<T>> Model<T>::parameters() {
  std::vector<ParamRef<T>> out;
  for (const LayerNode& n : graph_.nodes()) {
    NodeState& st = state_[n.id];
    const std::string base = (n.name.empty() ? std::string(to_string(n.kind)) : n.name) + "#" + std::to_string(n.id);
    if (n.kind == NodeKind::kConv) {
      out.push_back({base + ".weight", st.weight.data(), st.weight_grad.data(), n.binarized});
    } else if (n.kind == NodeKind::kBatchNorm) {
      out.push_back({base + ".gamma", std::span<T>(st.bn.gamma), std::span<T>(st.gamma_grad), false});
      out.push_back({base + ".beta", std::span<T>(st.bn.beta), std::span<T>(st.beta_grad), false});
    }
  }
  return out;
}

template class Model<float>;
template class Model<double>;

}  // namespace binloc
