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

#ifndef REVOICE_DIFFUSION_TRAIN_H_
#define REVOICE_DIFFUSION_TRAIN_H_

#include <string>
#include <vector>

#include "revoice/cond/codebook.h"
#include "revoice/cond/content_encoder.h"
#include "revoice/cond/speaker_encoder.h"
#include "revoice/diffusion/losses.h"
#include "revoice/diffusion/score_net.h"
#include "revoice/eval/manifest.h"
#include "revoice/nn/optim.h"

namespace revoice {
namespace diffusion {

struct VcTrainOptions {
  cond::ContentEncoderConfig encoder;
  ScoreNetConfig net;
  nn::OptimizerConfig optimizer;  // defaults: adam, lr 1e-4, batch 16
  VcLossConfig loss;
  DiffusionSchedule schedule;
  MelConfig mel;
  int crop_frames = 32;
  uint64_t seed = 1;
  bool train_mel_proj = true;  // auxiliary mel->coarse projection
  std::string log_csv_path;
  std::string encoder_ckpt;
  std::string score_ckpt;
  std::string mel_proj_ckpt;

  VcTrainOptions() {
    optimizer.kind = "adam";
    optimizer.learning_rate = 1e-4;
    optimizer.weight_decay = 0.0;
    optimizer.batch_size = 16;
    optimizer.epochs = 100;
  }
};

struct VcEpochLog {
  double l_d = 0.0;
  double l_enc = 0.0;
  double l_total = 0.0;
};

struct VcModels {
  cond::ContentEncoder encoder;
  ScoreNetwork net;
  cond::MelProjection mel_proj;
  std::vector<VcEpochLog> epochs;
};

// Joint content-encoder + decoder training on L_total = L_d + alpha * L_enc
// over clean clips; the speaker condition is the clip's own embedding from
// the already-fitted speaker encoder.
VcModels train_vc(const eval::Manifest& manifest, const cond::Codebook& codebook,
                  const cond::SpeakerEncoder& spk_enc, const VcTrainOptions& opts);

}  // namespace diffusion
}  // namespace revoice

#endif  // REVOICE_DIFFUSION_TRAIN_H_
