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

#ifndef REVOICE_COND_SPEAKER_ENCODER_H_
#define REVOICE_COND_SPEAKER_ENCODER_H_

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "revoice/audio/mel.h"
#include "revoice/nn/layers.h"
#include "revoice/nn/optim.h"

namespace revoice {
namespace cond {

/// Fixed-dimension unit-L2-norm voice identity vector.
struct SpeakerEmbedding {
  std::vector<float> v;
};

double cosine(const SpeakerEmbedding& a, const SpeakerEmbedding& b);

struct SpeakerEncoderConfig {
  int embed_dim = 192;
  int n_mels = 80;
  int n_speakers = 4;  // classifier head width during training
  uint64_t init_seed = 0x5bea;

  nlohmann::json to_json() const;
  static SpeakerEncoderConfig from_json(const nlohmann::json& j);
};

// Stand-in speaker encoder: mel mean+std pooling, a linear map to the
// embedding (taken pre-softmax), trained with cross-entropy speaker
// classification on the enrollment corpus.
class SpeakerEncoder {
 public:
  explicit SpeakerEncoder(const SpeakerEncoderConfig& cfg);

  // pooled [1, 2*n_mels] mean+std statistics
  nn::Tensor pool(const MelSpectrogram& mel) const;
  SpeakerEmbedding embed(const AudioClip& clip, const MelConfig& mel_cfg) const;
  // enrollment averaging then re-normalization; order-invariant
  SpeakerEmbedding embed_clips(const std::vector<AudioClip>& clips,
                               const MelConfig& mel_cfg) const;

  nn::Var logits(const nn::Var& pooled) const;  // training head
  nn::Var embedding_of(const nn::Var& pooled) const;

  nn::ParamStore& params() { return *store_; }
  const SpeakerEncoderConfig& config() const { return cfg_; }
  int64_t parameter_count() const { return store_->parameter_count(); }

  void save(const std::string& path) const;
  static SpeakerEncoder load(const std::string& path);
  void load_params(const std::string& path);

 private:
  SpeakerEncoderConfig cfg_;
  std::shared_ptr<nn::ParamStore> store_;
  nn::Linear trunk_;  // 2*n_mels -> embed_dim
  nn::Linear head_;   // embed_dim -> n_speakers
};

struct SpeakerTrainRow {
  AudioClip clip;
  std::string speaker_id;
};

// Cross-entropy classification training; label set is the sorted unique
// speaker ids. Returns per-epoch mean loss values.
std::vector<double> train_speaker_encoder(SpeakerEncoder& enc,
                                          const std::vector<SpeakerTrainRow>& rows,
                                          const MelConfig& mel_cfg,
                                          const nn::OptimizerConfig& opt_cfg,
                                          uint64_t seed);

// External embeddings: JSONL rows {speaker_id, vector: [...]}.
std::map<std::string, SpeakerEmbedding> load_external_embeddings(
    const std::string& jsonl_path);

constexpr double kMinSpeakerClipSeconds = 0.5;

}  // namespace cond
}  // namespace revoice

#endif  // REVOICE_COND_SPEAKER_ENCODER_H_
