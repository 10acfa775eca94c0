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

#ifndef REVOICE_NN_LAYERS_H_
#define REVOICE_NN_LAYERS_H_

#include <string>

#include "revoice/nn/module.h"

namespace revoice {
namespace nn {

constexpr double kInitStddev = 0.02;
constexpr double kLayerNormEps = 1e-5;

struct Linear {
  Var w;  // [in, out]
  Var b;  // [out], undefined when bias-less
  Linear() = default;
  Linear(ParamStore& store, const std::string& prefix, int in, int out, Rng& rng,
         bool zero_init = false, bool bias = true);
  Var forward(const Var& x) const;  // [T,in] -> [T,out]
};

struct LayerNorm {
  Var gamma, beta;
  LayerNorm() = default;
  LayerNorm(ParamStore& store, const std::string& prefix, int dim);
  Var forward_rows(const Var& x) const;
  Var forward_channels(const Var& x) const;
};

struct Conv1d {
  Var w;  // [k, cin, cout]
  Var b;  // [cout]
  PadMode1d pad_mode = PadMode1d::kReplicate;
  Conv1d() = default;
  Conv1d(ParamStore& store, const std::string& prefix, int k, int cin, int cout,
         Rng& rng, PadMode1d mode = PadMode1d::kReplicate);
  Var forward(const Var& x) const;  // [T,cin] -> [T,cout]
};

struct Conv2d {
  Var w;  // [cout, cin, kh, kw]
  Var b;  // [cout]
  int stride = 1, pad = 1;
  Conv2d() = default;
  Conv2d(ParamStore& store, const std::string& prefix, int cin, int cout, int kh,
         int kw, int stride, int pad, Rng& rng, bool zero_init = false);
  Var forward(const Var& x) const;  // [cin,H,W] -> [cout,Ho,Wo]
};

// Pre-norm style self-attention. When qk_positions is non-null those rows are
// added to queries and keys only; values and the residual stream never see
// positions, so identical input frames map to identical output frames.
struct MultiheadSelfAttention {
  Linear wq, wk, wv, wo;
  int heads = 1;
  int dim = 0;
  MultiheadSelfAttention() = default;
  MultiheadSelfAttention(ParamStore& store, const std::string& prefix, int dim,
                         int heads, Rng& rng);
  Var forward(const Var& x, const Tensor* qk_positions) const;
};

struct TransformerBlock {
  LayerNorm ln1, ln2;
  MultiheadSelfAttention attn;
  Linear ff1, ff2;
  TransformerBlock() = default;
  TransformerBlock(ParamStore& store, const std::string& prefix, int dim, int heads,
                   int ff_dim, Rng& rng);
  Var forward(const Var& x, const Tensor* qk_positions) const;
};

}  // namespace nn
}  // namespace revoice

#endif  // REVOICE_NN_LAYERS_H_
