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

#include "revoice/diffusion/score_net.h"

#include "revoice/nn/checkpoint.h"

namespace revoice {
namespace diffusion {

nlohmann::json ScoreNetConfig::to_json() const {
  return {{"resolutions", resolutions}, {"base_channels", base_channels},
          {"blocks", blocks},           {"time_dim", time_dim},
          {"spk_dim", spk_dim},         {"n_mels", n_mels},
          {"attn_lowest", attn_lowest}, {"init_seed", init_seed}};
}

ScoreNetConfig ScoreNetConfig::from_json(const nlohmann::json& j) {
  ScoreNetConfig c;
  c.resolutions = j.at("resolutions").get<int>();
  c.base_channels = j.at("base_channels").get<int>();
  c.blocks = j.at("blocks").get<int>();
  c.time_dim = j.value("time_dim", 64);
  c.spk_dim = j.value("spk_dim", 192);
  c.n_mels = j.value("n_mels", 80);
  c.attn_lowest = j.value("attn_lowest", true);
  c.init_seed = j.value("init_seed", static_cast<uint64_t>(0xd1ff));
  return c;
}

nn::Var ScoreNetwork::CondResBlock::forward(const nn::Var& x, const nn::Var& t_emb,
                                            const nn::Var& s_emb) const {
  nn::Var h = c1.forward(nn::silu(n1.forward_channels(x)));
  // conditioning enters as per-channel shifts
  nn::Var tb = nn::reshape(time_proj.forward(t_emb), {h.value().dim(0)});
  nn::Var sb = nn::reshape(spk_proj.forward(s_emb), {h.value().dim(0)});
  h = nn::add_bias_channels(h, tb);
  h = nn::add_bias_channels(h, sb);
  h = c2.forward(nn::silu(n2.forward_channels(h)));
  return nn::add(x, h);
}

nn::Var ScoreNetwork::Attn2d::forward(const nn::Var& x) const {
  if (!enabled) return x;
  const int c = x.value().dim(0), h = x.value().dim(1), w = x.value().dim(2);
  nn::Var tokens = nn::transpose2d(nn::reshape(x, {c, h * w}));  // [hw, c]
  nn::Var attended = mha.forward(norm.forward_rows(tokens), nullptr);
  nn::Var back = nn::reshape(nn::transpose2d(attended), {c, h, w});
  return nn::add(x, back);
}

ScoreNetwork::ScoreNetwork(const ScoreNetConfig& cfg)
    : cfg_(cfg), store_(std::make_shared<nn::ParamStore>()) {
  if (cfg.resolutions < 1 || cfg.base_channels < 1 || cfg.blocks < 1) {
    throw ConfigError("score net config dims must be >= 1");
  }
  Rng rng(cfg.init_seed);
  auto ch = [&](int level) { return cfg.base_channels << level; };
  auto make_block = [&](const std::string& p, int c) {
    CondResBlock rb;
    rb.n1 = nn::LayerNorm(*store_, p + ".n1", c);
    rb.c1 = nn::Conv2d(*store_, p + ".c1", c, c, 3, 3, 1, 1, rng);
    rb.n2 = nn::LayerNorm(*store_, p + ".n2", c);
    rb.c2 = nn::Conv2d(*store_, p + ".c2", c, c, 3, 3, 1, 1, rng);
    rb.time_proj = nn::Linear(*store_, p + ".time", cfg.time_dim, c, rng);
    rb.spk_proj = nn::Linear(*store_, p + ".spk", cfg.spk_dim, c, rng);
    return rb;
  };

  time_mlp1_ = nn::Linear(*store_, "time_mlp1", cfg.time_dim, cfg.time_dim, rng);
  time_mlp2_ = nn::Linear(*store_, "time_mlp2", cfg.time_dim, cfg.time_dim, rng);
  null_content_ = store_->add("null_content",
                              nn::trunc_normal_init({cfg.n_mels}, nn::kInitStddev, rng));
  null_spk_ = store_->add("null_spk",
                          nn::trunc_normal_init({cfg.spk_dim}, nn::kInitStddev, rng));

  stem_ = nn::Conv2d(*store_, "stem", 2, ch(0), 3, 3, 1, 1, rng);
  const int down_levels = cfg.resolutions - 1;
  levels_.resize(static_cast<size_t>(down_levels));
  for (int l = 0; l < down_levels; ++l) {
    Level& lev = levels_[static_cast<size_t>(l)];
    const std::string p = "level" + std::to_string(l);
    for (int b = 0; b < cfg.blocks; ++b) {
      lev.blocks.push_back(make_block(p + ".down" + std::to_string(b), ch(l)));
    }
    lev.down = nn::Conv2d(*store_, p + ".down", ch(l), ch(l + 1), 3, 3, 2, 1, rng);
    lev.up = nn::Conv2d(*store_, p + ".up", ch(l + 1), ch(l), 3, 3, 1, 1, rng);
    lev.merge = nn::Conv2d(*store_, p + ".merge", 2 * ch(l), ch(l), 3, 3, 1, 1, rng);
    for (int b = 0; b < cfg.blocks; ++b) {
      lev.up_blocks.push_back(make_block(p + ".upblk" + std::to_string(b), ch(l)));
    }
  }
  const int cm = ch(down_levels);
  for (int b = 0; b < cfg.blocks; ++b) {
    mid_.push_back(make_block("mid" + std::to_string(b), cm));
  }
  mid_attn_.enabled = cfg.attn_lowest;
  if (cfg.attn_lowest) {
    mid_attn_.norm = nn::LayerNorm(*store_, "mid_attn.norm", cm);
    mid_attn_.mha = nn::MultiheadSelfAttention(*store_, "mid_attn.mha", cm, 1, rng);
  }
  head_norm_ = nn::LayerNorm(*store_, "head.norm", ch(0));
  head_ = nn::Conv2d(*store_, "head.conv", ch(0), 1, 3, 3, 1, 1, rng, /*zero_init=*/true);
}

nn::Var ScoreNetwork::forward(const nn::Var& m_t, double t, const nn::Var* content,
                              const nn::Var* spk) const {
  if (m_t.value().ndim() != 2 || m_t.value().dim(1) != cfg_.n_mels) {
    throw ShapeMismatch("score net expects [frames, " + std::to_string(cfg_.n_mels) +
                        "], got " + m_t.value().shape_str());
  }
  const int frames = m_t.value().dim(0);
  const int mels = m_t.value().dim(1);

  nn::Var cond2d;
  if (content != nullptr) {
    if (!content->value().same_shape(m_t.value())) {
      throw ShapeMismatch("content condition shape mismatch");
    }
    cond2d = *content;
  } else {
    // tile the learned null row over frames: ones[F,1] x null[1,n_mels]
    nn::Var ones = nn::Var::constant(nn::Tensor::full({frames, 1}, 1.0f));
    cond2d = nn::matmul(ones, nn::reshape(null_content_, {1, cfg_.n_mels}));
  }

  nn::Var spk_emb = (spk != nullptr) ? *spk : nn::reshape(null_spk_, {1, cfg_.spk_dim});
  if (spk_emb.value().ndim() == 1) spk_emb = nn::reshape(spk_emb, {1, cfg_.spk_dim});
  if (spk_emb.value().dim(1) != cfg_.spk_dim) {
    throw ShapeMismatch("speaker embedding dim mismatch");
  }

  nn::Var t_emb = nn::Var::constant(nn::sinusoidal_time_embedding(t, cfg_.time_dim));
  t_emb = time_mlp2_.forward(nn::silu(time_mlp1_.forward(t_emb)));

  const int mult = 1 << (cfg_.resolutions - 1);
  const int ph = (mult - frames % mult) % mult;
  const int pw = (mult - mels % mult) % mult;

  nn::Var x = nn::reshape(m_t, {1, frames, mels});
  nn::Var c = nn::reshape(cond2d, {1, frames, mels});
  nn::Var h = nn::concat_channels(x, c);
  if (ph > 0 || pw > 0) h = nn::pad2d_br(h, ph, pw);
  h = stem_.forward(h);

  std::vector<nn::Var> skips;
  for (const Level& lev : levels_) {
    for (const CondResBlock& rb : lev.blocks) h = rb.forward(h, t_emb, spk_emb);
    skips.push_back(h);
    h = lev.down.forward(h);
  }
  for (size_t b = 0; b < mid_.size(); ++b) {
    h = mid_[b].forward(h, t_emb, spk_emb);
    if (b == 0) h = mid_attn_.forward(h);
  }
  for (int l = static_cast<int>(levels_.size()) - 1; l >= 0; --l) {
    const Level& lev = levels_[static_cast<size_t>(l)];
    h = lev.up.forward(nn::upsample2x_nearest(h));
    h = lev.merge.forward(nn::concat_channels(h, skips[static_cast<size_t>(l)]));
    for (const CondResBlock& rb : lev.up_blocks) h = rb.forward(h, t_emb, spk_emb);
  }
  h = head_.forward(nn::silu(head_norm_.forward_channels(h)));
  if (ph > 0 || pw > 0) h = nn::crop2d_tl(h, frames, mels);
  return nn::reshape(h, {frames, mels});
}

nn::Tensor ScoreNetwork::predict(const nn::Tensor& m_t, double t,
                                 const nn::Tensor* content, const nn::Tensor* spk) const {
  nn::Var mv = nn::Var::constant(m_t);
  nn::Var cv, sv;
  if (content != nullptr) cv = nn::Var::constant(*content);
  if (spk != nullptr) sv = nn::Var::constant(*spk);
  nn::Var out = forward(mv, t, content != nullptr ? &cv : nullptr,
                        spk != nullptr ? &sv : nullptr);
  return out.value();
}

void ScoreNetwork::save(const std::string& path) const {
  nn::save_checkpoint(path, cfg_.to_json(), store_->named_tensors());
}

ScoreNetwork ScoreNetwork::load(const std::string& path) {
  nn::Checkpoint ckpt = nn::load_checkpoint(path);
  ScoreNetwork net(ScoreNetConfig::from_json(ckpt.config));
  net.store_->load(ckpt.tensors);
  return net;
}

void ScoreNetwork::load_params(const std::string& path) {
  nn::load_checkpoint_into(path, cfg_.to_json(), *store_);
}

ScorePredictor predictor_of(const ScoreNetwork& net) {
  return [&net](const nn::Tensor& m_t, double t, const nn::Tensor* content,
                const nn::Tensor* spk) { return net.predict(m_t, t, content, spk); };
}

}  // namespace diffusion
}  // namespace revoice
