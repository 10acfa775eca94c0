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

#include "revoice/pipeline/enhance.h"

#include "revoice/nn/bridge.h"

namespace revoice {
namespace pipeline {

EnhanceMode mode_from_string(const std::string& s) {
  if (s == "gsr") return EnhanceMode::kGsr;
  if (s == "vc-mel") return EnhanceMode::kVcMel;
  if (s == "vc-ssl") return EnhanceMode::kVcSsl;
  if (s == "gsr+vc") return EnhanceMode::kGsrVc;
  throw ConfigError("unknown enhance mode: " + s);
}

std::string mode_to_string(EnhanceMode mode) {
  switch (mode) {
    case EnhanceMode::kGsr: return "gsr";
    case EnhanceMode::kVcMel: return "vc-mel";
    case EnhanceMode::kVcSsl: return "vc-ssl";
    case EnhanceMode::kGsrVc: return "gsr+vc";
  }
  throw ConfigError("bad mode enum");
}

std::string mode_display_name(EnhanceMode mode) {
  switch (mode) {
    case EnhanceMode::kGsr: return "GSR";
    case EnhanceMode::kVcMel: return "VC (Mel)";
    case EnhanceMode::kVcSsl: return "VC (SSL)";
    case EnhanceMode::kGsrVc: return "GSR+VC";
  }
  throw ConfigError("bad mode enum");
}

namespace {

// fixed stream tags so gsr+vc composes bit-exactly from its stages
constexpr uint64_t kGsrVocoderStream = 11;
constexpr uint64_t kVcSamplerStream = 12;
constexpr uint64_t kVcVocoderStream = 13;

void require(bool ok, EnhanceMode mode, const std::string& what) {
  if (!ok) {
    throw MissingComponent("mode " + mode_to_string(mode) + " needs " + what);
  }
}

AudioClip vc_stage(const AudioClip& input, EnhanceMode mode, bool use_mel_proj,
                   const ModelBundle& bundle, const std::vector<AudioClip>& enrollment,
                   const EnhanceOptions& opts) {
  require(bundle.score_net.has_value(), mode, "score_net");
  require(bundle.speaker_encoder.has_value() || opts.external_speaker != nullptr, mode,
          "speaker_encoder");

  const MelConfig& mel_cfg = bundle.mel_config;
  MelSpectrogram input_mel = mel_spectrogram(input, mel_cfg);

  // content conditioning
  MelSpectrogram coarse;
  if (use_mel_proj) {
    require(bundle.mel_proj.has_value(), mode, "mel_proj");
    coarse = bundle.mel_proj->apply(input_mel);
  } else {
    require(bundle.content_encoder.has_value(), mode, "content_encoder");
    cond::ContentUnits units;
    units.hop_length = mel_cfg.hop_length;
    if (opts.external_units != nullptr) {
      units.ids = *opts.external_units;
      if (static_cast<int>(units.ids.size()) != input_mel.frames) {
        throw ShapeMismatch("external units length does not match mel frames");
      }
    } else {
      require(bundle.codebook.has_value(), mode, "codebook");
      units = cond::extract_units_from_mel(input_mel, *bundle.codebook);
    }
    coarse = bundle.content_encoder->encode(units, mel_cfg);
  }

  // speaker conditioning from clean enrollment
  cond::SpeakerEmbedding spk;
  if (opts.external_speaker != nullptr) {
    spk = *opts.external_speaker;
  } else {
    if (enrollment.empty()) throw EmptyEnrollment("VC modes need enrollment clips");
    spk = bundle.speaker_encoder->embed_clips(enrollment, mel_cfg);
  }
  nn::Tensor spk_t({1, static_cast<int>(spk.v.size())});
  for (size_t i = 0; i < spk.v.size(); ++i) spk_t.at2(0, static_cast<int>(i)) = spk.v[i];

  const diffusion::GuidanceConfig& guidance =
      opts.override_guidance ? opts.guidance : bundle.guidance;
  nn::Tensor restored = diffusion::reverse_sample(
      diffusion::predictor_of(*bundle.score_net), nn::mel_to_tensor(coarse), spk_t,
      guidance, bundle.schedule, Rng::derive(opts.seed, kVcSamplerStream), opts.trace);

  MelSpectrogram restored_mel = nn::tensor_to_mel(restored, mel_cfg);
  return griffin_lim(restored_mel, bundle.vocoder.iterations,
                     Rng::derive(opts.seed, kVcVocoderStream));
}

}  // namespace

AudioClip enhance(const AudioClip& input, EnhanceMode mode, const ModelBundle& bundle,
                  const std::vector<AudioClip>& enrollment, const EnhanceOptions& opts) {
  validate_audio(input);
  switch (mode) {
    case EnhanceMode::kGsr: {
      require(bundle.gsr.has_value(), mode, "gsr");
      return gsr::gsr_enhance(*bundle.gsr, input, bundle.mel_config,
                              bundle.vocoder.iterations,
                              Rng::derive(opts.seed, kGsrVocoderStream));
    }
    case EnhanceMode::kVcMel:
    case EnhanceMode::kVcSsl:
      return vc_stage(input, mode, mode == EnhanceMode::kVcMel, bundle, enrollment, opts);
    case EnhanceMode::kGsrVc: {
      AudioClip mid = enhance(input, EnhanceMode::kGsr, bundle, {}, opts);
      return vc_stage(mid, mode, /*use_mel_proj=*/false, bundle, enrollment, opts);
    }
  }
  throw ConfigError("bad mode enum");
}

}  // namespace pipeline
}  // namespace revoice
