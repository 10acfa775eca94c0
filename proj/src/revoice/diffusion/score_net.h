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

#ifndef REVOICE_DIFFUSION_SCORE_NET_H_
#define REVOICE_DIFFUSION_SCORE_NET_H_

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "revoice/nn/layers.h"

namespace revoice {
namespace diffusion {

struct ScoreNetConfig {
  int resolutions = 3;  // U-Net levels (downsamples = resolutions - 1)
  int base_channels = 32;
  int blocks = 2;  // residual blocks per level
  int time_dim = 64;
  int spk_dim = 192;
  int n_mels = 80;
  bool attn_lowest = true;
  uint64_t init_seed = 0xd1ff;

  nlohmann::json to_json() const;
  static ScoreNetConfig from_json(const nlohmann::json& j);
};

// Conditional noise model s_theta(M_t, t | M_hat, s): U-Net over stacked
// (M_t, content) channels, sinusoidal time embedding through an MLP, speaker
// embedding broadcast-added after a linear map at every resolution. Dropped
// conditions are replaced by learned null embeddings. The head conv is
// zero-initialized.
class ScoreNetwork {
 public:
  explicit ScoreNetwork(const ScoreNetConfig& cfg);

  // m_t: [F, n_mels]; content/spk nullptr selects the learned null embedding
  nn::Var forward(const nn::Var& m_t, double t, const nn::Var* content,
                  const nn::Var* spk) const;
  nn::Tensor predict(const nn::Tensor& m_t, double t, const nn::Tensor* content,
                     const nn::Tensor* spk) const;

  nn::ParamStore& params() { return *store_; }
  const nn::ParamStore& params() const { return *store_; }
  const ScoreNetConfig& config() const { return cfg_; }
  int64_t parameter_count() const { return store_->parameter_count(); }

  void save(const std::string& path) const;
  static ScoreNetwork load(const std::string& path);
  void load_params(const std::string& path);

 private:
  struct CondResBlock {
    nn::LayerNorm n1, n2;
    nn::Conv2d c1, c2;
    nn::Linear time_proj;  // time_dim -> channels
    nn::Linear spk_proj;   // spk_dim -> channels
    nn::Var forward(const nn::Var& x, const nn::Var& t_emb, const nn::Var& s_emb) const;
  };
  struct Attn2d {
    nn::MultiheadSelfAttention mha;
    nn::LayerNorm norm;
    bool enabled = false;
    nn::Var forward(const nn::Var& x) const;
  };
  struct Level {
    std::vector<CondResBlock> blocks;
    nn::Conv2d down;
    nn::Conv2d up;
    nn::Conv2d merge;
    std::vector<CondResBlock> up_blocks;
  };

  ScoreNetConfig cfg_;
  std::shared_ptr<nn::ParamStore> store_;
  nn::Linear time_mlp1_, time_mlp2_;
  nn::Var null_content_;  // [n_mels], tiled over frames when content is dropped
  nn::Var null_spk_;      // [spk_dim]
  nn::Conv2d stem_;
  std::vector<Level> levels_;
  std::vector<CondResBlock> mid_;
  Attn2d mid_attn_;
  nn::LayerNorm head_norm_;
  nn::Conv2d head_;
};

// Net-substitution point for samplers/losses: returns s_theta given
// (m_t, t, content-or-null, spk-or-null).
using ScorePredictor = std::function<nn::Tensor(
    const nn::Tensor& m_t, double t, const nn::Tensor* content, const nn::Tensor* spk)>;

ScorePredictor predictor_of(const ScoreNetwork& net);

}  // namespace diffusion
}  // namespace revoice

#endif  // REVOICE_DIFFUSION_SCORE_NET_H_
