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

#include "revoice/cond/content_encoder.h"

#include "revoice/nn/checkpoint.h"

namespace revoice {
namespace cond {

nlohmann::json ContentEncoderConfig::to_json() const {
  return {{"k_clusters", k_clusters}, {"width", width},
          {"conv_layers", conv_layers}, {"conv_kernel", conv_kernel},
          {"n_layers", n_layers},       {"n_heads", n_heads},
          {"ff_mult", ff_mult},         {"n_mels", n_mels},
          {"init_seed", init_seed}};
}

ContentEncoderConfig ContentEncoderConfig::from_json(const nlohmann::json& j) {
  ContentEncoderConfig c;
  c.k_clusters = j.at("k_clusters").get<int>();
  c.width = j.at("width").get<int>();
  c.conv_layers = j.value("conv_layers", 3);
  c.conv_kernel = j.value("conv_kernel", 5);
  c.n_layers = j.at("n_layers").get<int>();
  c.n_heads = j.at("n_heads").get<int>();
  c.ff_mult = j.value("ff_mult", 4);
  c.n_mels = j.value("n_mels", 80);
  c.init_seed = j.value("init_seed", static_cast<uint64_t>(0xc0de));
  return c;
}

ContentEncoder::ContentEncoder(const ContentEncoderConfig& cfg)
    : cfg_(cfg), store_(std::make_shared<nn::ParamStore>()) {
  Rng rng(cfg.init_seed);
  embedding_ = store_->add("embedding",
                           nn::trunc_normal_init({cfg.k_clusters, cfg.width},
                                                 nn::kInitStddev, rng));
  for (int l = 0; l < cfg.conv_layers; ++l) {
    ConvStage st;
    const std::string p = "conv" + std::to_string(l);
    st.conv = nn::Conv1d(*store_, p, cfg.conv_kernel, cfg.width, cfg.width, rng,
                         nn::PadMode1d::kReplicate);
    st.norm = nn::LayerNorm(*store_, p + ".norm", cfg.width);
    convs_.push_back(st);
  }
  for (int l = 0; l < cfg.n_layers; ++l) {
    blocks_.emplace_back(*store_, "block" + std::to_string(l), cfg.width, cfg.n_heads,
                         cfg.ff_mult * cfg.width, rng);
  }
  final_norm_ = nn::LayerNorm(*store_, "final_norm", cfg.width);
  proj_ = nn::Linear(*store_, "proj", cfg.width, cfg.n_mels, rng);
}

nn::Var ContentEncoder::forward(const std::vector<int>& ids) const {
  nn::Var h = nn::embedding_lookup(embedding_, ids);
  for (const ConvStage& st : convs_) {
    h = nn::gelu(st.norm.forward_rows(st.conv.forward(h)));
  }
  const nn::Tensor positions =
      nn::sinusoidal_positions(static_cast<int>(ids.size()), cfg_.width);
  for (const nn::TransformerBlock& block : blocks_) {
    h = block.forward(h, &positions);
  }
  h = final_norm_.forward_rows(h);
  return proj_.forward(h);
}

MelSpectrogram ContentEncoder::encode(const ContentUnits& units,
                                      const MelConfig& mel_cfg) const {
  nn::Var out = forward(units.ids);
  return nn::tensor_to_mel(out.value(), mel_cfg);
}

void ContentEncoder::save(const std::string& path) const {
  nn::save_checkpoint(path, cfg_.to_json(), store_->named_tensors());
}

ContentEncoder ContentEncoder::load(const std::string& path) {
  nn::Checkpoint ckpt = nn::load_checkpoint(path);
  ContentEncoder enc(ContentEncoderConfig::from_json(ckpt.config));
  enc.store_->load(ckpt.tensors);
  return enc;
}

void ContentEncoder::load_params(const std::string& path) {
  nn::load_checkpoint_into(path, cfg_.to_json(), *store_);
}

double enc_loss(const MelSpectrogram& m0, const MelSpectrogram& m_hat) {
  if (!m0.same_shape(m_hat)) throw ShapeMismatch("enc_loss shape mismatch");
  double acc = 0.0;
  for (size_t i = 0; i < m0.values.size(); ++i) {
    acc += std::abs(static_cast<double>(m0.values[i]) - m_hat.values[i]);
  }
  return acc / static_cast<double>(m0.values.size());
}

nn::Var enc_loss_var(const nn::Var& m0, const nn::Var& m_hat) {
  return nn::l1_mean(m0, m_hat);
}

MelProjection::MelProjection(int n_mels, uint64_t init_seed)
    : n_mels_(n_mels), init_seed_(init_seed), store_(std::make_shared<nn::ParamStore>()) {
  Rng rng(init_seed);
  lin_ = nn::Linear(*store_, "proj", n_mels, n_mels, rng);
}

nn::Var MelProjection::forward(const nn::Var& mel) const { return lin_.forward(mel); }

MelSpectrogram MelProjection::apply(const MelSpectrogram& mel) const {
  nn::Var out = forward(nn::Var::constant(nn::mel_to_tensor(mel)));
  return nn::tensor_to_mel(out.value(), mel.config);
}

nlohmann::json MelProjection::config_json() const {
  return {{"n_mels", n_mels_}, {"init_seed", init_seed_}};
}

void MelProjection::save(const std::string& path) const {
  nn::save_checkpoint(path, config_json(), store_->named_tensors());
}

MelProjection MelProjection::load(const std::string& path) {
  nn::Checkpoint ckpt = nn::load_checkpoint(path);
  MelProjection proj(ckpt.config.at("n_mels").get<int>(),
                     ckpt.config.value("init_seed", static_cast<uint64_t>(0x3e1)));
  proj.store_->load(ckpt.tensors);
  return proj;
}

}  // namespace cond
}  // namespace revoice
