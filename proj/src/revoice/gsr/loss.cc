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

#include "revoice/gsr/loss.h"

#include "revoice/nn/bridge.h"

namespace revoice {
namespace gsr {

nlohmann::json GsrLossConfig::to_json() const {
  return {{"mel_weight", mel_weight},
          {"adversarial_enabled", adversarial_enabled},
          {"adv_weight", adv_weight},
          {"fm_weight", fm_weight},
          {"disc_scales", disc_scales},
          {"disc_base_channels", disc_base_channels},
          {"disc_init_seed", disc_init_seed}};
}

GsrLossConfig GsrLossConfig::from_json(const nlohmann::json& j) {
  GsrLossConfig c;
  c.mel_weight = j.value("mel_weight", 1.0);
  c.adversarial_enabled = j.value("adversarial_enabled", false);
  c.adv_weight = j.value("adv_weight", 1.0);
  c.fm_weight = j.value("fm_weight", 2.0);
  c.disc_scales = j.value("disc_scales", 2);
  c.disc_base_channels = j.value("disc_base_channels", 8);
  c.disc_init_seed = j.value("disc_init_seed", static_cast<uint64_t>(0xd15c));
  if (c.mel_weight <= 0.0) throw ConfigError("mel_weight must be > 0");
  return c;
}

SpectrogramDiscriminator::SpectrogramDiscriminator(int scales, int base_channels,
                                                   uint64_t seed)
    : scales_(scales), store_(std::make_shared<nn::ParamStore>()) {
  if (scales < 1) throw ConfigError("discriminator needs >= 1 scale");
  Rng rng(seed);
  stacks_.resize(static_cast<size_t>(scales));
  for (int s = 0; s < scales; ++s) {
    Stack& st = stacks_[static_cast<size_t>(s)];
    const std::string p = "scale" + std::to_string(s);
    int cin = 1;
    int cout = base_channels;
    for (int l = 0; l < 3; ++l) {
      st.convs.push_back(
          nn::Conv2d(*store_, p + ".conv" + std::to_string(l), cin, cout, 3, 3, 2, 1, rng));
      cin = cout;
      cout *= 2;
    }
    st.out = nn::Conv2d(*store_, p + ".out", cin, 1, 3, 3, 1, 1, rng);
  }
}

std::vector<SpectrogramDiscriminator::ScaleOut> SpectrogramDiscriminator::forward(
    const nn::Var& mel2d) const {
  const int frames = mel2d.value().dim(0);
  const int mels = mel2d.value().dim(1);
  // pad so every pooled/strided stage stays even-sized
  const int mult = 1 << (scales_ + 2);
  const int ph = (mult - frames % mult) % mult;
  const int pw = (mult - mels % mult) % mult;
  nn::Var x = nn::reshape(mel2d, {1, frames, mels});
  if (ph > 0 || pw > 0) x = nn::pad2d_br(x, ph, pw);

  std::vector<ScaleOut> outs;
  for (int s = 0; s < scales_; ++s) {
    const Stack& st = stacks_[static_cast<size_t>(s)];
    ScaleOut so;
    nn::Var h = x;
    for (const nn::Conv2d& c : st.convs) {
      h = nn::leaky_relu(c.forward(h), 0.1);
      so.features.push_back(h);
    }
    so.logits = st.out.forward(h);
    outs.push_back(std::move(so));
    if (s + 1 < scales_) x = nn::avg_pool2x(x);
  }
  return outs;
}

namespace {
// mean((logits - target)^2)
nn::Var lsgan_term(const nn::Var& logits, double target) {
  nn::Var d = nn::add_scalar(logits, -target);
  return nn::scale(nn::sum_sq(d), 1.0 / static_cast<double>(d.value().numel()));
}
}  // namespace

nn::Var gsr_generator_loss(const nn::Var& pred, const nn::Var& target,
                           const GsrLossConfig& cfg,
                           const SpectrogramDiscriminator* disc,
                           GsrLossComponents* out) {
  if (!pred.value().same_shape(target.value())) {
    throw ShapeMismatch("gsr loss shape mismatch: " + pred.value().shape_str() +
                        " vs " + target.value().shape_str());
  }
  nn::Var mel_term = nn::l1_mean(pred, target);
  nn::Var total = nn::scale(mel_term, cfg.mel_weight);
  double adv_value = 0.0, fm_value = 0.0;
  if (cfg.adversarial_enabled) {
    if (disc == nullptr) throw ConfigError("adversarial loss needs a discriminator");
    auto fake = disc->forward(pred);
    auto real = disc->forward(target);
    nn::Var adv, fm;
    for (size_t s = 0; s < fake.size(); ++s) {
      nn::Var a = lsgan_term(fake[s].logits, 1.0);
      adv = adv.defined() ? nn::add(adv, a) : a;
      for (size_t f = 0; f < fake[s].features.size(); ++f) {
        nn::Var m = nn::l1_mean(fake[s].features[f], real[s].features[f]);
        fm = fm.defined() ? nn::add(fm, m) : m;
      }
    }
    adv_value = adv.value().flat(0);
    fm_value = fm.value().flat(0);
    total = nn::add(total, nn::add(nn::scale(adv, cfg.adv_weight),
                                   nn::scale(fm, cfg.fm_weight)));
  }
  if (out != nullptr) {
    out->mel = mel_term.value().flat(0);
    out->adv = adv_value;
    out->fm = fm_value;
    out->total = total.value().flat(0);
  }
  return total;
}

GsrLossComponents gsr_loss(const MelSpectrogram& pred, const MelSpectrogram& target,
                           const GsrLossConfig& cfg,
                           const SpectrogramDiscriminator* disc) {
  nn::Var p = nn::Var::constant(nn::mel_to_tensor(pred));
  nn::Var t = nn::Var::constant(nn::mel_to_tensor(target));
  GsrLossComponents out;
  gsr_generator_loss(p, t, cfg, disc, &out);
  return out;
}

nn::Var discriminator_loss(const SpectrogramDiscriminator& disc, const nn::Tensor& real,
                           const nn::Tensor& fake) {
  auto real_out = disc.forward(nn::Var::constant(real));
  auto fake_out = disc.forward(nn::Var::constant(fake));
  nn::Var loss;
  for (size_t s = 0; s < real_out.size(); ++s) {
    nn::Var term = nn::add(lsgan_term(real_out[s].logits, 1.0),
                           lsgan_term(fake_out[s].logits, 0.0));
    loss = loss.defined() ? nn::add(loss, term) : term;
  }
  return loss;
}

}  // namespace gsr
}  // namespace revoice
