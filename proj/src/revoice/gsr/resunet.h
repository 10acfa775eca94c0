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

#ifndef REVOICE_GSR_RESUNET_H_
#define REVOICE_GSR_RESUNET_H_

#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "revoice/audio/mel.h"
#include "revoice/nn/bridge.h"
#include "revoice/nn/layers.h"

namespace revoice {
namespace gsr {

struct GsrConfig {
  int depth = 4;             // down/up stages
  int base_channels = 16;    // doubled per stage
  int blocks_per_stage = 2;
  int n_mels = 80;
  uint64_t init_seed = 0x9572;

  nlohmann::json to_json() const;
  static GsrConfig from_json(const nlohmann::json& j);
  // roughly the paper-scale footprint; shipped for completeness, not trained in CI
  static GsrConfig paper_scale();
};

// Residual mel restoration: output = input + unet(input), computed in the
// log-mel domain. The output conv is zero-initialized, so an untrained model
// is exactly the identity map.
class GsrModel {
 public:
  explicit GsrModel(const GsrConfig& cfg);

  nn::Var forward_var(const nn::Var& x) const;  // [frames, n_mels]
  MelSpectrogram forward(const MelSpectrogram& x) const;

  nn::ParamStore& params() { return *store_; }
  const nn::ParamStore& params() const { return *store_; }
  const GsrConfig& config() const { return cfg_; }
  int64_t parameter_count() const { return store_->parameter_count(); }

  void save(const std::string& path) const;
  static GsrModel load(const std::string& path);
  void load_params(const std::string& path);

 private:
  struct ResBlock {
    nn::LayerNorm n1, n2;
    nn::Conv2d c1, c2;
    nn::Var forward(const nn::Var& x) const;
  };
  struct Level {
    std::vector<ResBlock> blocks;
    nn::Conv2d down;             // stride-2, into next level width
    nn::Conv2d up;               // after upsample, back to this width
    nn::Conv2d merge;            // 2c -> c after skip concat
    std::vector<ResBlock> up_blocks;
  };

  GsrConfig cfg_;
  std::shared_ptr<nn::ParamStore> store_;
  nn::Conv2d stem_;
  std::vector<Level> levels_;
  std::vector<ResBlock> mid_;
  nn::LayerNorm head_norm_;
  nn::Conv2d head_;  // zero-init
};

/// Vocoded restoration: vocoder(gsr_forward(model, mel(audio))).
AudioClip gsr_enhance(const GsrModel& model, const AudioClip& audio,
                      const MelConfig& mel_cfg, int vocoder_iterations,
                      uint64_t vocoder_seed);

}  // namespace gsr
}  // namespace revoice

#endif  // REVOICE_GSR_RESUNET_H_
