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

#include "revoice/nn/layers.h"

#include <cmath>

namespace revoice {
namespace nn {

Linear::Linear(ParamStore& store, const std::string& prefix, int in, int out,
               Rng& rng, bool zero_init, bool bias) {
  w = store.add(prefix + ".w", zero_init ? Tensor::zeros({in, out})
                                         : trunc_normal_init({in, out}, kInitStddev, rng));
  if (bias) b = store.add(prefix + ".b", Tensor::zeros({out}));
}

Var Linear::forward(const Var& x) const {
  Var y = matmul(x, w);
  if (b.defined()) y = add_bias_rows(y, b);
  return y;
}

LayerNorm::LayerNorm(ParamStore& store, const std::string& prefix, int dim) {
  gamma = store.add(prefix + ".gamma", ones_init({dim}));
  beta = store.add(prefix + ".beta", Tensor::zeros({dim}));
}

Var LayerNorm::forward_rows(const Var& x) const {
  return layer_norm_rows(x, gamma, beta, kLayerNormEps);
}

Var LayerNorm::forward_channels(const Var& x) const {
  return layer_norm_channels(x, gamma, beta, kLayerNormEps);
}

Conv1d::Conv1d(ParamStore& store, const std::string& prefix, int k, int cin,
               int cout, Rng& rng, PadMode1d mode)
    : pad_mode(mode) {
  w = store.add(prefix + ".w", trunc_normal_init({k, cin, cout}, kInitStddev, rng));
  b = store.add(prefix + ".b", Tensor::zeros({cout}));
}

Var Conv1d::forward(const Var& x) const { return conv1d_same(x, w, b, pad_mode); }

Conv2d::Conv2d(ParamStore& store, const std::string& prefix, int cin, int cout,
               int kh, int kw, int stride_, int pad_, Rng& rng, bool zero_init)
    : stride(stride_), pad(pad_) {
  w = store.add(prefix + ".w",
                zero_init ? Tensor::zeros({cout, cin, kh, kw})
                          : trunc_normal_init({cout, cin, kh, kw}, kInitStddev, rng));
  b = store.add(prefix + ".b", Tensor::zeros({cout}));
}

Var Conv2d::forward(const Var& x) const { return conv2d(x, w, b, stride, pad); }

MultiheadSelfAttention::MultiheadSelfAttention(ParamStore& store,
                                               const std::string& prefix, int dim_,
                                               int heads_, Rng& rng)
    : heads(heads_), dim(dim_) {
  if (dim % heads != 0) throw ShapeMismatch("attention dim must divide heads");
  wq = Linear(store, prefix + ".q", dim, dim, rng);
  wk = Linear(store, prefix + ".k", dim, dim, rng);
  wv = Linear(store, prefix + ".v", dim, dim, rng);
  wo = Linear(store, prefix + ".o", dim, dim, rng);
}

Var MultiheadSelfAttention::forward(const Var& x, const Tensor* qk_positions) const {
  Var q = wq.forward(x);
  Var k = wk.forward(x);
  Var v = wv.forward(x);
  if (qk_positions != nullptr) {
    Var pos = Var::constant(*qk_positions);
    q = add(q, pos);
    k = add(k, pos);
  }
  const int dh = dim / heads;
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(dh));
  Var out;
  for (int h = 0; h < heads; ++h) {
    Var qh = slice_cols(q, h * dh, dh);
    Var kh = slice_cols(k, h * dh, dh);
    Var vh = slice_cols(v, h * dh, dh);
    Var scores = scale(matmul_nt(qh, kh), inv_sqrt);
    Var attn = softmax_rows(scores);
    Var oh = matmul(attn, vh);
    out = out.defined() ? concat_cols(out, oh) : oh;
  }
  return wo.forward(out);
}

TransformerBlock::TransformerBlock(ParamStore& store, const std::string& prefix,
                                   int dim, int heads, int ff_dim, Rng& rng) {
  ln1 = LayerNorm(store, prefix + ".ln1", dim);
  ln2 = LayerNorm(store, prefix + ".ln2", dim);
  attn = MultiheadSelfAttention(store, prefix + ".attn", dim, heads, rng);
  ff1 = Linear(store, prefix + ".ff1", dim, ff_dim, rng);
  ff2 = Linear(store, prefix + ".ff2", ff_dim, dim, rng);
}

Var TransformerBlock::forward(const Var& x, const Tensor* qk_positions) const {
  Var h = add(x, attn.forward(ln1.forward_rows(x), qk_positions));
  Var f = ff2.forward(gelu(ff1.forward(ln2.forward_rows(h))));
  return add(h, f);
}

}  // namespace nn
}  // namespace revoice
