// Copyright 2026  The revoice authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef REVOICE_NN_AUTODIFF_H_
#define REVOICE_NN_AUTODIFF_H_

#include <functional>
#include <memory>
#include <vector>

#include "revoice/nn/tensor.h"

namespace revoice {
namespace nn {

// Reverse-mode tape over Tensors. Each op builds a node holding its value and
// a closure that scatters the node's gradient into its parents.
struct Node {
  Tensor value;
  Tensor grad;
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backprop;

  void ensure_grad() {
    if (!grad.defined()) grad = Tensor(value.shape());
  }
};

class Var {
 public:
  Var() = default;
  explicit Var(std::shared_ptr<Node> n) : node_(std::move(n)) {}

  static Var leaf(Tensor value, bool requires_grad);
  static Var constant(Tensor value) { return leaf(std::move(value), false); }

  bool defined() const { return node_ != nullptr; }
  const Tensor& value() const { return node_->value; }
  Tensor& mutable_value() { return node_->value; }
  bool requires_grad() const { return node_->requires_grad; }
  Tensor& grad() {
    node_->ensure_grad();
    return node_->grad;
  }
  void zero_grad() {
    if (node_ != nullptr && node_->grad.defined()) {
      for (int64_t i = 0; i < node_->grad.numel(); ++i) node_->grad.flat(i) = 0.0f;
    }
  }
  const std::shared_ptr<Node>& node() const { return node_; }

 private:
  std::shared_ptr<Node> node_;
};

/// Backpropagates from a scalar ([1]-shaped) loss.
void backward(const Var& loss);

enum class PadMode1d { kZero, kReplicate };

// elementwise
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var scale(const Var& a, double k);
Var add_scalar(const Var& a, double k);
Var relu(const Var& x);
Var leaky_relu(const Var& x, double slope);
Var gelu(const Var& x);
Var silu(const Var& x);
Var tanh_act(const Var& x);

// matrix
Var matmul(const Var& a, const Var& b);     // [M,K]x[K,N]
Var matmul_nt(const Var& a, const Var& b);  // [M,K]x[N,K]^T
Var transpose2d(const Var& x);
Var reshape(const Var& x, std::vector<int> shape);

// structure
Var concat_cols(const Var& a, const Var& b);
Var slice_cols(const Var& x, int start, int len);
Var concat_channels(const Var& a, const Var& b);
Var pad2d_br(const Var& x, int pad_h, int pad_w);   // zero pad bottom/right
Var crop2d_tl(const Var& x, int new_h, int new_w);  // keep top-left block

// normalization / softmax
Var layer_norm_rows(const Var& x, const Var& gamma, const Var& beta, double eps);
Var layer_norm_channels(const Var& x, const Var& gamma, const Var& beta, double eps);
Var softmax_rows(const Var& x);
Var log_softmax_rows(const Var& x);

// conv / resampling
Var conv1d_same(const Var& x, const Var& w, const Var& b, PadMode1d mode);
Var conv2d(const Var& x, const Var& w, const Var& b, int stride, int pad);
Var avg_pool2x(const Var& x);
Var upsample2x_nearest(const Var& x);

// broadcast bias
Var add_bias_rows(const Var& x, const Var& v);
Var add_bias_channels(const Var& x, const Var& v);

// embedding
Var embedding_lookup(const Var& table, const std::vector<int>& ids);

// reductions (all return [1])
Var sum_all(const Var& x);
Var mean_all(const Var& x);
Var sum_sq(const Var& x);
Var l1_mean(const Var& a, const Var& b);
Var nll_rows(const Var& log_probs, const std::vector<int>& targets);

}  // namespace nn
}  // namespace revoice

#endif  // REVOICE_NN_AUTODIFF_H_
