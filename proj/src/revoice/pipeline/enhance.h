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

#ifndef REVOICE_PIPELINE_ENHANCE_H_
#define REVOICE_PIPELINE_ENHANCE_H_

#include <string>
#include <vector>

#include "revoice/pipeline/bundle.h"

namespace revoice {
namespace pipeline {

enum class EnhanceMode { kGsr, kVcMel, kVcSsl, kGsrVc };

EnhanceMode mode_from_string(const std::string& s);  // gsr | vc-mel | vc-ssl | gsr+vc
std::string mode_to_string(EnhanceMode mode);
std::string mode_display_name(EnhanceMode mode);  // ablation table row names

struct EnhanceOptions {
  uint64_t seed = 1;
  // overrides bundle.guidance scales when set
  bool override_guidance = false;
  diffusion::GuidanceConfig guidance;
  // optional externally supplied content units (bypasses the codebook)
  const std::vector<int>* external_units = nullptr;
  // optional externally supplied speaker embedding (bypasses enrollment)
  const cond::SpeakerEmbedding* external_speaker = nullptr;
  diffusion::SamplerTrace* trace = nullptr;
};

// Two-stage restoration entry point. GSR mode never touches enrollment; the
// VC modes require clean enrollment clips (or an external embedding). The
// gsr+vc mode is literally the composition: VC applied to the GSR output
// waveform.
AudioClip enhance(const AudioClip& input, EnhanceMode mode, const ModelBundle& bundle,
                  const std::vector<AudioClip>& enrollment,
                  const EnhanceOptions& opts = {});

}  // namespace pipeline
}  // namespace revoice

#endif  // REVOICE_PIPELINE_ENHANCE_H_
