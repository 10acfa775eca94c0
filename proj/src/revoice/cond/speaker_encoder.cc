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

#include "revoice/cond/speaker_encoder.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "revoice/common/io.h"
#include "revoice/nn/checkpoint.h"

namespace revoice {
namespace cond {

double cosine(const SpeakerEmbedding& a, const SpeakerEmbedding& b) {
  if (a.v.size() != b.v.size()) throw ShapeMismatch("embedding dim mismatch");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (size_t i = 0; i < a.v.size(); ++i) {
    dot += static_cast<double>(a.v[i]) * b.v[i];
    na += static_cast<double>(a.v[i]) * a.v[i];
    nb += static_cast<double>(b.v[i]) * b.v[i];
  }
  if (na == 0.0 || nb == 0.0) throw ZeroSignal("cosine of zero embedding");
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

nlohmann::json SpeakerEncoderConfig::to_json() const {
  return {{"embed_dim", embed_dim},
          {"n_mels", n_mels},
          {"n_speakers", n_speakers},
          {"init_seed", init_seed}};
}

SpeakerEncoderConfig SpeakerEncoderConfig::from_json(const nlohmann::json& j) {
  SpeakerEncoderConfig c;
  c.embed_dim = j.at("embed_dim").get<int>();
  c.n_mels = j.value("n_mels", 80);
  c.n_speakers = j.at("n_speakers").get<int>();
  c.init_seed = j.value("init_seed", static_cast<uint64_t>(0x5bea));
  return c;
}

SpeakerEncoder::SpeakerEncoder(const SpeakerEncoderConfig& cfg)
    : cfg_(cfg), store_(std::make_shared<nn::ParamStore>()) {
  Rng rng(cfg.init_seed);
  trunk_ = nn::Linear(*store_, "trunk", 2 * cfg.n_mels, cfg.embed_dim, rng);
  head_ = nn::Linear(*store_, "head", cfg.embed_dim, cfg.n_speakers, rng);
}

nn::Tensor SpeakerEncoder::pool(const MelSpectrogram& mel) const {
  nn::Tensor out({1, 2 * cfg_.n_mels});
  for (int m = 0; m < mel.n_mels; ++m) {
    double mean = 0.0;
    for (int f = 0; f < mel.frames; ++f) mean += mel.at(f, m);
    mean /= mel.frames;
    double var = 0.0;
    for (int f = 0; f < mel.frames; ++f) {
      const double d = mel.at(f, m) - mean;
      var += d * d;
    }
    var /= mel.frames;
    out.at2(0, m) = static_cast<float>(mean);
    out.at2(0, mel.n_mels + m) = static_cast<float>(std::sqrt(var));
  }
  return out;
}

nn::Var SpeakerEncoder::embedding_of(const nn::Var& pooled) const {
  return trunk_.forward(pooled);
}

nn::Var SpeakerEncoder::logits(const nn::Var& pooled) const {
  return head_.forward(embedding_of(pooled));
}

namespace {
SpeakerEmbedding normalized(std::vector<float> v) {
  double norm = 0.0;
  for (float x : v) norm += static_cast<double>(x) * x;
  norm = std::sqrt(norm);
  if (norm < 1e-12) {
    // degenerate but deterministic
    v.assign(v.size(), 0.0f);
    v[0] = 1.0f;
    return {std::move(v)};
  }
  for (float& x : v) x = static_cast<float>(x / norm);
  return {std::move(v)};
}
}  // namespace

SpeakerEmbedding SpeakerEncoder::embed(const AudioClip& clip,
                                       const MelConfig& mel_cfg) const {
  validate_audio(clip);
  if (clip.duration_s() < kMinSpeakerClipSeconds) {
    throw ClipTooShort("speaker clips must be >= 0.5 s");
  }
  nn::Tensor pooled = pool(mel_spectrogram(clip, mel_cfg));
  nn::Var emb = embedding_of(nn::Var::constant(pooled));
  std::vector<float> v(static_cast<size_t>(cfg_.embed_dim));
  for (int i = 0; i < cfg_.embed_dim; ++i) v[static_cast<size_t>(i)] = emb.value().at2(0, i);
  return normalized(std::move(v));
}

SpeakerEmbedding SpeakerEncoder::embed_clips(const std::vector<AudioClip>& clips,
                                             const MelConfig& mel_cfg) const {
  if (clips.empty()) throw EmptyEnrollment("enrollment set is empty");
  std::vector<double> acc(static_cast<size_t>(cfg_.embed_dim), 0.0);
  for (const AudioClip& clip : clips) {
    SpeakerEmbedding e = embed(clip, mel_cfg);
    for (size_t i = 0; i < acc.size(); ++i) acc[i] += e.v[i];
  }
  std::vector<float> mean(acc.size());
  for (size_t i = 0; i < acc.size(); ++i) {
    mean[i] = static_cast<float>(acc[i] / static_cast<double>(clips.size()));
  }
  return normalized(std::move(mean));
}

void SpeakerEncoder::save(const std::string& path) const {
  nn::save_checkpoint(path, cfg_.to_json(), store_->named_tensors());
}

SpeakerEncoder SpeakerEncoder::load(const std::string& path) {
  nn::Checkpoint ckpt = nn::load_checkpoint(path);
  SpeakerEncoder enc(SpeakerEncoderConfig::from_json(ckpt.config));
  enc.store_->load(ckpt.tensors);
  return enc;
}

void SpeakerEncoder::load_params(const std::string& path) {
  nn::load_checkpoint_into(path, cfg_.to_json(), *store_);
}

std::vector<double> train_speaker_encoder(SpeakerEncoder& enc,
                                          const std::vector<SpeakerTrainRow>& rows,
                                          const MelConfig& mel_cfg,
                                          const nn::OptimizerConfig& opt_cfg,
                                          uint64_t seed) {
  if (rows.empty()) throw EmptyManifest("train_speaker_encoder: no rows");
  std::set<std::string> speaker_set;
  for (const SpeakerTrainRow& r : rows) speaker_set.insert(r.speaker_id);
  std::vector<std::string> speakers(speaker_set.begin(), speaker_set.end());
  if (static_cast<int>(speakers.size()) > enc.config().n_speakers) {
    throw ConfigError("speaker encoder head smaller than the speaker set");
  }
  auto label_of = [&](const std::string& id) {
    return static_cast<int>(std::lower_bound(speakers.begin(), speakers.end(), id) -
                            speakers.begin());
  };

  std::vector<nn::Tensor> pooled;
  std::vector<int> labels;
  for (const SpeakerTrainRow& r : rows) {
    pooled.push_back(enc.pool(mel_spectrogram(r.clip, mel_cfg)));
    labels.push_back(label_of(r.speaker_id));
  }

  nn::Optimizer opt(enc.params(), opt_cfg);
  std::vector<size_t> order(rows.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;

  std::vector<double> epoch_losses;
  for (int epoch = 0; epoch < opt_cfg.epochs; ++epoch) {
    Rng rng(Rng::derive(seed, 0x4b1d + static_cast<uint64_t>(epoch)));
    rng.shuffle(order);
    opt.set_epoch(epoch);
    double loss_sum = 0.0;
    int batches = 0;
    for (size_t start = 0; start < order.size(); start += opt_cfg.batch_size) {
      const size_t end = std::min(order.size(), start + opt_cfg.batch_size);
      const double loss = nn::train_step(opt, [&]() {
        nn::Var total;
        for (size_t i = start; i < end; ++i) {
          nn::Var lp = nn::log_softmax_rows(
              enc.logits(nn::Var::constant(pooled[order[i]])));
          nn::Var nll = nn::nll_rows(lp, {labels[order[i]]});
          total = total.defined() ? nn::add(total, nll) : nll;
        }
        return nn::scale(total, 1.0 / static_cast<double>(end - start));
      });
      loss_sum += loss;
      ++batches;
    }
    epoch_losses.push_back(loss_sum / batches);
  }
  return epoch_losses;
}

std::map<std::string, SpeakerEmbedding> load_external_embeddings(
    const std::string& jsonl_path) {
  const std::string raw = read_file(jsonl_path);
  std::map<std::string, SpeakerEmbedding> out;
  std::istringstream ss(raw);
  std::string line;
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line);
    SpeakerEmbedding e;
    e.v = j.at("vector").get<std::vector<float>>();
    out[j.at("speaker_id").get<std::string>()] = normalized(e.v);
  }
  return out;
}

}  // namespace cond
}  // namespace revoice
