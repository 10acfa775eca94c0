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

#include "revoice/diffusion/train.h"

#include <algorithm>
#include <sstream>

#include "revoice/audio/wav.h"
#include "revoice/common/io.h"
#include "revoice/nn/bridge.h"

namespace revoice {
namespace diffusion {

namespace {
struct ClipData {
  nn::Tensor mel;        // [frames, n_mels]
  std::vector<int> ids;  // per frame
  nn::Tensor spk;        // [1, spk_dim]
};

struct Crop {
  nn::Tensor mel;
  std::vector<int> ids;
};

Crop crop_clip(const ClipData& clip, int crop_frames, Rng& rng) {
  const int frames = clip.mel.dim(0);
  const int mels = clip.mel.dim(1);
  if (frames <= crop_frames) {
    return {clip.mel, clip.ids};
  }
  const int start = static_cast<int>(rng.uniform_int(0, frames - crop_frames));
  Crop out;
  out.mel = nn::Tensor({crop_frames, mels});
  out.ids.assign(clip.ids.begin() + start, clip.ids.begin() + start + crop_frames);
  for (int f = 0; f < crop_frames; ++f) {
    for (int m = 0; m < mels; ++m) out.mel.at2(f, m) = clip.mel.at2(start + f, m);
  }
  return out;
}
}  // namespace

VcModels train_vc(const eval::Manifest& manifest, const cond::Codebook& codebook,
                  const cond::SpeakerEncoder& spk_enc, const VcTrainOptions& opts) {
  if (manifest.rows.empty()) throw EmptyManifest("train_vc: empty manifest");
  nn::validate_optimizer_config(opts.optimizer);
  if (opts.encoder.k_clusters != codebook.k) {
    throw ConfigError("encoder k_clusters must match the codebook size");
  }

  std::vector<ClipData> clips;
  for (const eval::ManifestRow& row : manifest.rows) {
    AudioClip clean = read_wav(row.clean_path);
    MelSpectrogram mel = mel_spectrogram(clean, opts.mel);
    ClipData data;
    data.mel = nn::mel_to_tensor(mel);
    data.ids = cond::extract_units_from_mel(mel, codebook).ids;
    cond::SpeakerEmbedding emb = spk_enc.embed(clean, opts.mel);
    data.spk = nn::Tensor({1, static_cast<int>(emb.v.size())});
    for (size_t i = 0; i < emb.v.size(); ++i) data.spk.at2(0, static_cast<int>(i)) = emb.v[i];
    clips.push_back(std::move(data));
  }

  VcModels models{cond::ContentEncoder(opts.encoder), ScoreNetwork(opts.net),
                  cond::MelProjection(opts.mel.n_mels,
                                      Rng::derive(opts.seed, 0x9e1)), {}};
  nn::Optimizer opt({&models.encoder.params(), &models.net.params()}, opts.optimizer);
  nn::OptimizerConfig proj_cfg = opts.optimizer;
  nn::Optimizer proj_opt(models.mel_proj.params(), proj_cfg);

  std::ostringstream log;
  log << "epoch,l_d,l_enc,l_total\n";

  std::vector<size_t> order(clips.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (int epoch = 0; epoch < opts.optimizer.epochs; ++epoch) {
    Rng rng(Rng::derive(opts.seed, 0xcc00 + static_cast<uint64_t>(epoch)));
    rng.shuffle(order);
    opt.set_epoch(epoch);
    proj_opt.set_epoch(epoch);

    VcEpochLog elog;
    int item_count = 0;
    for (size_t start = 0; start < order.size(); start += opts.optimizer.batch_size) {
      const size_t end = std::min(order.size(), start + opts.optimizer.batch_size);
      std::vector<Crop> crops;
      std::vector<const nn::Tensor*> spks;
      for (size_t i = start; i < end; ++i) {
        crops.push_back(crop_clip(clips[order[i]], opts.crop_frames, rng));
        spks.push_back(&clips[order[i]].spk);
      }
      double batch_ld = 0.0, batch_lenc = 0.0;
      nn::train_step(opt, [&]() {
        nn::Var total;
        batch_ld = 0.0;
        batch_lenc = 0.0;
        for (size_t bi = 0; bi < crops.size(); ++bi) {
          const Crop& item = crops[bi];
          nn::Var m0 = nn::Var::constant(item.mel);
          nn::Var m_hat = models.encoder.forward(item.ids);
          nn::Var spk = nn::Var::constant(*spks[bi]);

          const double t = rng.uniform(opts.loss.t_min, 1.0);
          const double a = opts.schedule.mean_coef(t);
          const double s = opts.schedule.sigma(t);
          nn::Tensor noise(item.mel.shape());
          for (int64_t i = 0; i < noise.numel(); ++i) {
            noise.flat(i) = static_cast<float>(rng.normal());
          }
          nn::Var noise_v = nn::Var::constant(noise);
          nn::Var m_t = nn::add(nn::add(m_hat, nn::scale(nn::sub(m0, m_hat), a)),
                                nn::scale(noise_v, s));

          const bool drop_content = rng.uniform() < opts.loss.cfg_dropout;
          const bool drop_spk = rng.uniform() < opts.loss.cfg_dropout;
          nn::Var pred = models.net.forward(m_t, t, drop_content ? nullptr : &m_hat,
                                            drop_spk ? nullptr : &spk);

          nn::Var l_d = nn::sum_sq(nn::add(pred, noise_v));
          nn::Var l_enc = cond::enc_loss_var(m0, m_hat);
          nn::Var item_total = nn::add(l_d, nn::scale(l_enc, opts.loss.alpha));
          batch_ld += l_d.value().flat(0);
          batch_lenc += l_enc.value().flat(0);
          total = total.defined() ? nn::add(total, item_total) : item_total;
        }
        return nn::scale(total, 1.0 / static_cast<double>(crops.size()));
      });
      elog.l_d += batch_ld;
      elog.l_enc += batch_lenc;
      item_count += static_cast<int>(crops.size());

      if (opts.train_mel_proj) {
        nn::train_step(proj_opt, [&]() {
          nn::Var total;
          for (const Crop& item : crops) {
            nn::Var m0 = nn::Var::constant(item.mel);
            nn::Var proj = models.mel_proj.forward(m0);
            nn::Var l = nn::l1_mean(m0, proj);
            total = total.defined() ? nn::add(total, l) : l;
          }
          return nn::scale(total, 1.0 / static_cast<double>(crops.size()));
        });
      }
    }
    elog.l_d /= item_count;
    elog.l_enc /= item_count;
    elog.l_total = total_loss(elog.l_d, elog.l_enc, opts.loss);
    models.epochs.push_back(elog);
    log << epoch << "," << elog.l_d << "," << elog.l_enc << "," << elog.l_total << "\n";
  }

  if (!opts.log_csv_path.empty()) write_file(opts.log_csv_path, log.str());
  if (!opts.encoder_ckpt.empty()) models.encoder.save(opts.encoder_ckpt);
  if (!opts.score_ckpt.empty()) models.net.save(opts.score_ckpt);
  if (!opts.mel_proj_ckpt.empty()) models.mel_proj.save(opts.mel_proj_ckpt);
  return models;
}

}  // namespace diffusion
}  // namespace revoice
