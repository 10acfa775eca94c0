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

#ifndef REVOICE_GSR_LOSS_H_
#define REVOICE_GSR_LOSS_H_

#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "revoice/audio/mel.h"
#include "revoice/nn/layers.h"

namespace revoice {
namespace gsr {

struct GsrLossConfig {
  double mel_weight = 1.0;
  bool adversarial_enabled = false;
  double adv_weight = 1.0;
  double fm_weight = 2.0;
  int disc_scales = 2;
  int disc_base_channels = 8;
  uint64_t disc_init_seed = 0xd15c;

  nlohmann::json to_json() const;
  static GsrLossConfig from_json(const nlohmann::json& j);
};

struct GsrLossComponents {
  double mel = 0.0;
  double adv = 0.0;
  double fm = 0.0;
  double total = 0.0;
};

// Least-squares GAN discriminator over log-mel patches, run at several
// down-pooled scales. Used only when adversarial training is enabled.
class SpectrogramDiscriminator {
 public:
  SpectrogramDiscriminator(int scales, int base_channels, uint64_t seed);

  struct ScaleOut {
    std::vector<nn::Var> features;
    nn::Var logits;
  };
  std::vector<ScaleOut> forward(const nn::Var& mel2d) const;  // [frames, 80]

  nn::ParamStore& params() { return *store_; }
  int scales() const { return scales_; }

 private:
  struct Stack {
    std::vector<nn::Conv2d> convs;
    nn::Conv2d out;
  };
  int scales_;
  std::shared_ptr<nn::ParamStore> store_;
  std::vector<Stack> stacks_;
};

// Generator-side loss graph: mel L1 (always) plus LSGAN + feature-matching
// terms when enabled. Component values are reported through `out`.
nn::Var gsr_generator_loss(const nn::Var& pred, const nn::Var& target,
                           const GsrLossConfig& cfg,
                           const SpectrogramDiscriminator* disc,
                           GsrLossComponents* out);

// Value-level loss components for two mel spectrograms.
GsrLossComponents gsr_loss(const MelSpectrogram& pred, const MelSpectrogram& target,
                           const GsrLossConfig& cfg,
                           const SpectrogramDiscriminator* disc = nullptr);

// LSGAN discriminator objective: (D(real)-1)^2 + D(fake)^2, fake detached.
nn::Var discriminator_loss(const SpectrogramDiscriminator& disc, const nn::Tensor& real,
                           const nn::Tensor& fake);

}  // namespace gsr
}  // namespace revoice

#endif  // REVOICE_GSR_LOSS_H_
