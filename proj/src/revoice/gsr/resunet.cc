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

#include "revoice/gsr/resunet.h"

#include "revoice/nn/checkpoint.h"

namespace revoice {
namespace gsr {

nlohmann::json GsrConfig::to_json() const {
  return {{"depth", depth},
          {"base_channels", base_channels},
          {"blocks_per_stage", blocks_per_stage},
          {"n_mels", n_mels},
          {"init_seed", init_seed}};
}

GsrConfig GsrConfig::from_json(const nlohmann::json& j) {
  GsrConfig c;
  c.depth = j.at("depth").get<int>();
  c.base_channels = j.at("base_channels").get<int>();
  c.blocks_per_stage = j.at("blocks_per_stage").get<int>();
  c.n_mels = j.value("n_mels", 80);
  c.init_seed = j.value("init_seed", static_cast<uint64_t>(0x9572));
  return c;
}

GsrConfig GsrConfig::paper_scale() {
  GsrConfig c;
  c.depth = 4;
  c.base_channels = 96;
  c.blocks_per_stage = 4;
  return c;
}

nn::Var GsrModel::ResBlock::forward(const nn::Var& x) const {
  nn::Var h = c1.forward(nn::silu(n1.forward_channels(x)));
  h = c2.forward(nn::silu(n2.forward_channels(h)));
  return nn::add(x, h);
}

GsrModel::GsrModel(const GsrConfig& cfg)
    : cfg_(cfg), store_(std::make_shared<nn::ParamStore>()) {
  if (cfg.depth < 1 || cfg.base_channels < 1 || cfg.blocks_per_stage < 1) {
    throw ConfigError("gsr config dims must be >= 1");
  }
  Rng rng(cfg.init_seed);
  auto ch = [&](int level) { return cfg.base_channels << level; };

  stem_ = nn::Conv2d(*store_, "stem", 1, ch(0), 3, 3, 1, 1, rng);
  levels_.resize(cfg.depth);
  for (int l = 0; l < cfg.depth; ++l) {
    Level& lev = levels_[l];
    const std::string p = "level" + std::to_string(l);
    for (int b = 0; b < cfg.blocks_per_stage; ++b) {
      ResBlock rb;
      const std::string bp = p + ".down" + std::to_string(b);
      rb.n1 = nn::LayerNorm(*store_, bp + ".n1", ch(l));
      rb.c1 = nn::Conv2d(*store_, bp + ".c1", ch(l), ch(l), 3, 3, 1, 1, rng);
      rb.n2 = nn::LayerNorm(*store_, bp + ".n2", ch(l));
      rb.c2 = nn::Conv2d(*store_, bp + ".c2", ch(l), ch(l), 3, 3, 1, 1, rng);
      lev.blocks.push_back(rb);
    }
    lev.down = nn::Conv2d(*store_, p + ".down", ch(l), ch(l + 1), 3, 3, 2, 1, rng);
    lev.up = nn::Conv2d(*store_, p + ".up", ch(l + 1), ch(l), 3, 3, 1, 1, rng);
    lev.merge = nn::Conv2d(*store_, p + ".merge", 2 * ch(l), ch(l), 3, 3, 1, 1, rng);
    for (int b = 0; b < cfg.blocks_per_stage; ++b) {
      ResBlock rb;
      const std::string bp = p + ".upblk" + std::to_string(b);
      rb.n1 = nn::LayerNorm(*store_, bp + ".n1", ch(l));
      rb.c1 = nn::Conv2d(*store_, bp + ".c1", ch(l), ch(l), 3, 3, 1, 1, rng);
      rb.n2 = nn::LayerNorm(*store_, bp + ".n2", ch(l));
      rb.c2 = nn::Conv2d(*store_, bp + ".c2", ch(l), ch(l), 3, 3, 1, 1, rng);
      lev.up_blocks.push_back(rb);
    }
  }
  for (int b = 0; b < cfg.blocks_per_stage; ++b) {
    ResBlock rb;
    const std::string bp = "mid" + std::to_string(b);
    rb.n1 = nn::LayerNorm(*store_, bp + ".n1", ch(cfg.depth));
    rb.c1 = nn::Conv2d(*store_, bp + ".c1", ch(cfg.depth), ch(cfg.depth), 3, 3, 1, 1, rng);
    rb.n2 = nn::LayerNorm(*store_, bp + ".n2", ch(cfg.depth));
    rb.c2 = nn::Conv2d(*store_, bp + ".c2", ch(cfg.depth), ch(cfg.depth), 3, 3, 1, 1, rng);
    mid_.push_back(rb);
  }
  head_norm_ = nn::LayerNorm(*store_, "head.norm", ch(0));
  head_ = nn::Conv2d(*store_, "head.conv", ch(0), 1, 3, 3, 1, 1, rng, /*zero_init=*/true);
}

nn::Var GsrModel::forward_var(const nn::Var& x) const {
  if (x.value().ndim() != 2 || x.value().dim(1) != cfg_.n_mels) {
    throw ShapeMismatch("gsr expects [frames, " + std::to_string(cfg_.n_mels) +
                        "], got " + x.value().shape_str());
  }
  const int frames = x.value().dim(0);
  const int mels = x.value().dim(1);
  const int mult = 1 << cfg_.depth;
  const int ph = (mult - frames % mult) % mult;
  const int pw = (mult - mels % mult) % mult;

  nn::Var h = nn::reshape(x, {1, frames, mels});
  if (ph > 0 || pw > 0) h = nn::pad2d_br(h, ph, pw);
  h = stem_.forward(h);

  std::vector<nn::Var> skips;
  for (const Level& lev : levels_) {
    for (const ResBlock& rb : lev.blocks) h = rb.forward(h);
    skips.push_back(h);
    h = lev.down.forward(h);
  }
  for (const ResBlock& rb : mid_) h = rb.forward(h);
  for (int l = cfg_.depth - 1; l >= 0; --l) {
    const Level& lev = levels_[l];
    h = lev.up.forward(nn::upsample2x_nearest(h));
    h = lev.merge.forward(nn::concat_channels(h, skips[static_cast<size_t>(l)]));
    for (const ResBlock& rb : lev.up_blocks) h = rb.forward(h);
  }
  h = head_.forward(nn::silu(head_norm_.forward_channels(h)));
  if (ph > 0 || pw > 0) h = nn::crop2d_tl(h, frames, mels);
  nn::Var residual = nn::reshape(h, {frames, mels});
  return nn::add(x, residual);
}

MelSpectrogram GsrModel::forward(const MelSpectrogram& x) const {
  nn::Var in = nn::Var::constant(nn::mel_to_tensor(x));
  nn::Var out = forward_var(in);
  return nn::tensor_to_mel(out.value(), x.config);
}

void GsrModel::save(const std::string& path) const {
  nn::save_checkpoint(path, cfg_.to_json(), store_->named_tensors());
}

GsrModel GsrModel::load(const std::string& path) {
  nn::Checkpoint ckpt = nn::load_checkpoint(path);
  GsrModel model(GsrConfig::from_json(ckpt.config));
  model.store_->load(ckpt.tensors);
  return model;
}

void GsrModel::load_params(const std::string& path) {
  nn::load_checkpoint_into(path, cfg_.to_json(), *store_);
}

AudioClip gsr_enhance(const GsrModel& model, const AudioClip& audio,
                      const MelConfig& mel_cfg, int vocoder_iterations,
                      uint64_t vocoder_seed) {
  MelSpectrogram restored = model.forward(mel_spectrogram(audio, mel_cfg));
  return griffin_lim(restored, vocoder_iterations, vocoder_seed);
}

}  // namespace gsr
}  // namespace revoice
