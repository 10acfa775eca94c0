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

#ifndef REVOICE_PIPELINE_BUNDLE_H_
#define REVOICE_PIPELINE_BUNDLE_H_

#include <optional>
#include <string>

#include "revoice/cond/codebook.h"
#include "revoice/cond/content_encoder.h"
#include "revoice/cond/speaker_encoder.h"
#include "revoice/diffusion/sampler.h"
#include "revoice/diffusion/score_net.h"
#include "revoice/gsr/resunet.h"

namespace revoice {
namespace pipeline {

constexpr int kBundleFormatVersion = 1;

struct VocoderSpec {
  std::string kind = "griffin_lim";
  int iterations = 64;

  nlohmann::json to_json() const { return {{"kind", kind}, {"iterations", iterations}}; }
  static VocoderSpec from_json(const nlohmann::json& j) {
    VocoderSpec v;
    v.kind = j.value("kind", "griffin_lim");
    v.iterations = j.value("iterations", 64);
    if (v.kind != "griffin_lim") throw ConfigError("unknown vocoder kind: " + v.kind);
    return v;
  }
};

// All trained components plus the shared analysis/guidance settings.
// Components are optional; enhance() raises MissingComponent when a mode
// needs one that is absent.
struct ModelBundle {
  MelConfig mel_config;
  diffusion::DiffusionSchedule schedule;
  diffusion::GuidanceConfig guidance;
  VocoderSpec vocoder;
  std::optional<gsr::GsrModel> gsr;
  std::optional<cond::Codebook> codebook;
  std::optional<cond::ContentEncoder> content_encoder;
  std::optional<diffusion::ScoreNetwork> score_net;
  std::optional<cond::SpeakerEncoder> speaker_encoder;
  std::optional<cond::MelProjection> mel_proj;
};

// Directory layout: bundle.json (component table + shared configs) plus one
// checkpoint file per component. Loading verifies each checkpoint against the
// config hash recorded in bundle.json; listed-but-missing files are tolerated
// and surface later as MissingComponent from enhance().
void save_bundle(const ModelBundle& bundle, const std::string& dir);
ModelBundle load_bundle(const std::string& dir);

// Writes bundle.json for whatever known component checkpoints already exist
// in the directory (gsr.ckpt, codebook.ckpt, content_encoder.ckpt,
// score_net.ckpt, speaker_encoder.ckpt, mel_proj.ckpt).
void write_bundle_manifest(const std::string& dir, const MelConfig& mel,
                           const diffusion::DiffusionSchedule& schedule,
                           const diffusion::GuidanceConfig& guidance,
                           const VocoderSpec& vocoder);

nlohmann::json mel_config_to_json(const MelConfig& cfg);
MelConfig mel_config_from_json(const nlohmann::json& j);

}  // namespace pipeline
}  // namespace revoice

#endif  // REVOICE_PIPELINE_BUNDLE_H_
