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

#include "revoice/gsr/train.h"

#include <sstream>

#include "revoice/audio/wav.h"
#include "revoice/common/io.h"
#include "revoice/nn/bridge.h"

namespace revoice {
namespace gsr {

namespace {
struct Pair {
  nn::Tensor degraded;
  nn::Tensor clean;
};

// aligned random crop; clips shorter than crop_frames are used whole
Pair crop_pair(const Pair& full, int crop_frames, Rng& rng) {
  const int frames = full.degraded.dim(0);
  if (frames <= crop_frames) return full;
  const int start = static_cast<int>(rng.uniform_int(0, frames - crop_frames));
  const int mels = full.degraded.dim(1);
  Pair out{nn::Tensor({crop_frames, mels}), nn::Tensor({crop_frames, mels})};
  for (int f = 0; f < crop_frames; ++f) {
    for (int m = 0; m < mels; ++m) {
      out.degraded.at2(f, m) = full.degraded.at2(start + f, m);
      out.clean.at2(f, m) = full.clean.at2(start + f, m);
    }
  }
  return out;
}
}  // namespace

GsrModel train_gsr(const eval::Manifest& manifest, const GsrTrainOptions& opts) {
  if (manifest.rows.empty()) throw EmptyManifest("train_gsr: empty manifest");
  nn::validate_optimizer_config(opts.optimizer);

  std::vector<Pair> pairs;
  for (const eval::ManifestRow& row : manifest.rows) {
    if (row.degraded_path.empty()) {
      throw ConfigError("train_gsr: row " + row.utterance_id + " has no degraded_path");
    }
    AudioClip degraded = read_wav(row.degraded_path);
    AudioClip clean = read_wav(row.clean_path);
    if (degraded.samples.size() != clean.samples.size()) {
      throw LengthMismatch("train_gsr: pair length mismatch for " + row.utterance_id);
    }
    pairs.push_back({nn::mel_to_tensor(mel_spectrogram(degraded, opts.mel)),
                     nn::mel_to_tensor(mel_spectrogram(clean, opts.mel))});
  }

  GsrModel model(opts.model);
  nn::Optimizer opt(model.params(), opts.optimizer);

  std::unique_ptr<SpectrogramDiscriminator> disc;
  std::unique_ptr<nn::Optimizer> disc_opt;
  if (opts.loss.adversarial_enabled) {
    disc = std::make_unique<SpectrogramDiscriminator>(
        opts.loss.disc_scales, opts.loss.disc_base_channels, opts.loss.disc_init_seed);
    nn::OptimizerConfig dcfg = opts.optimizer;
    disc_opt = std::make_unique<nn::Optimizer>(disc->params(), dcfg);
  }

  std::ostringstream log;
  log << "epoch,mel_loss,adv_loss,fm_loss,lr\n";

  std::vector<size_t> order(pairs.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (int epoch = 0; epoch < opts.optimizer.epochs; ++epoch) {
    Rng rng(Rng::derive(opts.seed, 0x6e0c + static_cast<uint64_t>(epoch)));
    rng.shuffle(order);
    opt.set_epoch(epoch);
    if (disc_opt) disc_opt->set_epoch(epoch);

    double mel_sum = 0.0, adv_sum = 0.0, fm_sum = 0.0;
    int batches = 0;
    for (size_t start = 0; start < order.size(); start += opts.optimizer.batch_size) {
      const size_t end = std::min(order.size(), start + opts.optimizer.batch_size);
      std::vector<Pair> batch;
      for (size_t i = start; i < end; ++i) {
        batch.push_back(crop_pair(pairs[order[i]], opts.crop_frames, rng));
      }
      GsrLossComponents comps_sum;
      const double loss_value = nn::train_step(opt, [&]() {
        nn::Var total;
        for (const Pair& item : batch) {
          nn::Var pred = model.forward_var(nn::Var::constant(item.degraded));
          GsrLossComponents comps;
          nn::Var l = gsr_generator_loss(pred, nn::Var::constant(item.clean), opts.loss,
                                         disc.get(), &comps);
          comps_sum.mel += comps.mel;
          comps_sum.adv += comps.adv;
          comps_sum.fm += comps.fm;
          total = total.defined() ? nn::add(total, l) : l;
        }
        return nn::scale(total, 1.0 / static_cast<double>(batch.size()));
      });
      (void)loss_value;
      mel_sum += comps_sum.mel / static_cast<double>(batch.size());
      adv_sum += comps_sum.adv / static_cast<double>(batch.size());
      fm_sum += comps_sum.fm / static_cast<double>(batch.size());
      ++batches;

      if (disc) {
        nn::train_step(*disc_opt, [&]() {
          nn::Var total;
          for (const Pair& item : batch) {
            nn::Var pred = model.forward_var(nn::Var::constant(item.degraded));
            nn::Var l = discriminator_loss(*disc, item.clean, pred.value());
            total = total.defined() ? nn::add(total, l) : l;
          }
          return nn::scale(total, 1.0 / static_cast<double>(batch.size()));
        });
      }
    }
    log << epoch << "," << mel_sum / batches << "," << adv_sum / batches << ","
        << fm_sum / batches << "," << opt.current_lr() << "\n";
  }

  if (!opts.log_csv_path.empty()) write_file(opts.log_csv_path, log.str());
  if (!opts.checkpoint_path.empty()) model.save(opts.checkpoint_path);
  return model;
}

}  // namespace gsr
}  // namespace revoice
