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

#ifndef REVOICE_CLI_CONFIG_H_
#define REVOICE_CLI_CONFIG_H_

#include <string>
#include <vector>

#include "revoice/cond/content_encoder.h"
#include "revoice/cond/speaker_encoder.h"
#include "revoice/diffusion/train.h"
#include "revoice/gsr/train.h"
#include "revoice/pipeline/bundle.h"

namespace revoice {
namespace cli {

// One JSON document with sections mel, degrade, gsr, conditioning, diffusion,
// guidance, eval, seeds. Unknown keys are rejected; every default is the
// corresponding published value where one exists.
struct RunConfig {
  MelConfig mel;

  struct DegradeSection {
    double snr_min = -15.0;
    double snr_max = 40.0;
    double packet_drop_max_ms = 100.0;
  } degrade;

  struct GsrSection {
    gsr::GsrConfig model;
    gsr::GsrLossConfig loss;
    nn::OptimizerConfig optimizer;
    int crop_frames = 64;
    GsrSection() {
      optimizer.kind = "adamw";
      optimizer.learning_rate = 2e-4;
      optimizer.decay_gamma = 0.999;
      optimizer.batch_size = 32;
      optimizer.epochs = 100;
    }
  } gsr;

  struct ConditioningSection {
    int k_clusters = 100;  // paper value 2000, desk default 100
    cond::ContentEncoderConfig encoder;
    cond::SpeakerEncoderConfig speaker;
    nn::OptimizerConfig speaker_optimizer;
    ConditioningSection() {
      speaker_optimizer.kind = "adam";
      speaker_optimizer.learning_rate = 1e-3;
      speaker_optimizer.weight_decay = 0.0;
      speaker_optimizer.batch_size = 8;
      speaker_optimizer.epochs = 60;
    }
  } conditioning;

  struct DiffusionSection {
    diffusion::ScoreNetConfig net;
    diffusion::DiffusionSchedule schedule;
    double alpha = 0.5;
    double t_min = diffusion::kTrainTimeMin;
    nn::OptimizerConfig optimizer;
    int crop_frames = 32;
    DiffusionSection() {
      optimizer.kind = "adam";
      optimizer.learning_rate = 1e-4;
      optimizer.weight_decay = 0.0;
      optimizer.batch_size = 16;
      optimizer.epochs = 100;
    }
  } diffusion_cfg;

  diffusion::GuidanceConfig guidance;
  pipeline::VocoderSpec vocoder;

  struct EvalSection {
    std::vector<std::string> metrics = {"lsd", "si_sdr", "mel_l1"};
  } eval;

  struct Seeds {
    uint64_t default_seed = 1;
  } seeds;
};

nlohmann::json run_config_to_json(const RunConfig& cfg);
// merges over defaults; every key must exist in the default document
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);

}  // namespace cli
}  // namespace revoice

#endif  // REVOICE_CLI_CONFIG_H_
