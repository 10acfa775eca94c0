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

#ifndef REVOICE_COND_CONTENT_ENCODER_H_
#define REVOICE_COND_CONTENT_ENCODER_H_

#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "revoice/cond/codebook.h"
#include "revoice/nn/bridge.h"
#include "revoice/nn/layers.h"

namespace revoice {
namespace cond {

struct ContentEncoderConfig {
  int k_clusters = 100;
  int width = 192;
  int conv_layers = 3;
  int conv_kernel = 5;
  int n_layers = 6;
  int n_heads = 4;
  int ff_mult = 4;
  int n_mels = 80;
  uint64_t init_seed = 0xc0de;

  nlohmann::json to_json() const;
  static ContentEncoderConfig from_json(const nlohmann::json& j);
};

// Discrete units -> coarse spectrogram. Unit embeddings, conv+layer-norm
// front end, pre-norm transformer stack, linear projection to mel width.
// Sinusoidal positions enter attention queries/keys only, so a constant unit
// sequence maps to a constant output sequence.
class ContentEncoder {
 public:
  explicit ContentEncoder(const ContentEncoderConfig& cfg);

  nn::Var forward(const std::vector<int>& ids) const;  // [T, n_mels]
  MelSpectrogram encode(const ContentUnits& units, const MelConfig& mel_cfg) const;

  nn::ParamStore& params() { return *store_; }
  const nn::ParamStore& params() const { return *store_; }
  const ContentEncoderConfig& config() const { return cfg_; }
  int64_t parameter_count() const { return store_->parameter_count(); }

  void save(const std::string& path) const;
  static ContentEncoder load(const std::string& path);
  void load_params(const std::string& path);

 private:
  struct ConvStage {
    nn::Conv1d conv;
    nn::LayerNorm norm;
  };
  ContentEncoderConfig cfg_;
  std::shared_ptr<nn::ParamStore> store_;
  nn::Var embedding_;  // [K, width]
  std::vector<ConvStage> convs_;
  std::vector<nn::TransformerBlock> blocks_;
  nn::LayerNorm final_norm_;
  nn::Linear proj_;
};

/// Eq.-style encoder loss: mean absolute difference between the clean mel and
/// the coarse spectrogram.
double enc_loss(const MelSpectrogram& m0, const MelSpectrogram& m_hat);
nn::Var enc_loss_var(const nn::Var& m0, const nn::Var& m_hat);

// Trained linear mel->mel map standing in for the coarse spectrogram when the
// content encoder is bypassed (mel-input ablation).
class MelProjection {
 public:
  explicit MelProjection(int n_mels, uint64_t init_seed = 0x3e1);
  nn::Var forward(const nn::Var& mel) const;
  MelSpectrogram apply(const MelSpectrogram& mel) const;
  nn::ParamStore& params() { return *store_; }
  int n_mels() const { return n_mels_; }
  nlohmann::json config_json() const;
  void save(const std::string& path) const;
  static MelProjection load(const std::string& path);

 private:
  int n_mels_;
  uint64_t init_seed_;
  std::shared_ptr<nn::ParamStore> store_;
  nn::Linear lin_;
};

}  // namespace cond
}  // namespace revoice

#endif  // REVOICE_COND_CONTENT_ENCODER_H_
