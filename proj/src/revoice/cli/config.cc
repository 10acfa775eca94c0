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

#include "revoice/cli/config.h"

#include "revoice/common/io.h"

namespace revoice {
namespace cli {

namespace {

nlohmann::json optimizer_to_json(const nn::OptimizerConfig& o) {
  return {{"kind", o.kind},
          {"learning_rate", o.learning_rate},
          {"beta1", o.beta1},
          {"beta2", o.beta2},
          {"eps", o.eps},
          {"weight_decay", o.weight_decay},
          {"decay_gamma", o.decay_gamma},
          {"batch_size", o.batch_size},
          {"epochs", o.epochs}};
}

nn::OptimizerConfig optimizer_from_json(const nlohmann::json& j,
                                        nn::OptimizerConfig base) {
  base.kind = j.value("kind", base.kind);
  base.learning_rate = j.value("learning_rate", base.learning_rate);
  base.beta1 = j.value("beta1", base.beta1);
  base.beta2 = j.value("beta2", base.beta2);
  base.eps = j.value("eps", base.eps);
  base.weight_decay = j.value("weight_decay", base.weight_decay);
  base.decay_gamma = j.value("decay_gamma", base.decay_gamma);
  base.batch_size = j.value("batch_size", base.batch_size);
  base.epochs = j.value("epochs", base.epochs);
  nn::validate_optimizer_config(base);
  return base;
}

// every key present in `doc` must exist in `schema` (recursively)
void reject_unknown_keys(const nlohmann::json& doc, const nlohmann::json& schema,
                         const std::string& where) {
  if (!doc.is_object()) return;
  if (!schema.is_object()) {
    throw ConfigError("config section " + where + " must not be an object");
  }
  for (const auto& [key, value] : doc.items()) {
    if (!schema.contains(key)) {
      throw ConfigError("unknown config key: " + where + key);
    }
    if (value.is_object()) reject_unknown_keys(value, schema.at(key), where + key + ".");
  }
}

}  // namespace

nlohmann::json run_config_to_json(const RunConfig& cfg) {
  return {
      {"mel", pipeline::mel_config_to_json(cfg.mel)},
      {"degrade",
       {{"snr_min", cfg.degrade.snr_min},
        {"snr_max", cfg.degrade.snr_max},
        {"packet_drop_max_ms", cfg.degrade.packet_drop_max_ms}}},
      {"gsr",
       {{"model", cfg.gsr.model.to_json()},
        {"loss", cfg.gsr.loss.to_json()},
        {"optimizer", optimizer_to_json(cfg.gsr.optimizer)},
        {"crop_frames", cfg.gsr.crop_frames}}},
      {"conditioning",
       {{"k_clusters", cfg.conditioning.k_clusters},
        {"encoder", cfg.conditioning.encoder.to_json()},
        {"speaker", cfg.conditioning.speaker.to_json()},
        {"speaker_optimizer", optimizer_to_json(cfg.conditioning.speaker_optimizer)}}},
      {"diffusion",
       {{"net", cfg.diffusion_cfg.net.to_json()},
        {"schedule", cfg.diffusion_cfg.schedule.to_json()},
        {"alpha", cfg.diffusion_cfg.alpha},
        {"t_min", cfg.diffusion_cfg.t_min},
        {"optimizer", optimizer_to_json(cfg.diffusion_cfg.optimizer)},
        {"crop_frames", cfg.diffusion_cfg.crop_frames}}},
      {"guidance", cfg.guidance.to_json()},
      {"vocoder", cfg.vocoder.to_json()},
      {"eval", {{"metrics", cfg.eval.metrics}}},
      {"seeds", {{"default", cfg.seeds.default_seed}}},
  };
}

RunConfig run_config_from_json(const nlohmann::json& j) {
  RunConfig cfg;  // defaults
  reject_unknown_keys(j, run_config_to_json(cfg), "");

  if (j.contains("mel")) {
    nlohmann::json merged = pipeline::mel_config_to_json(cfg.mel);
    merged.update(j.at("mel"));
    cfg.mel = pipeline::mel_config_from_json(merged);
  }
  if (j.contains("degrade")) {
    const auto& d = j.at("degrade");
    cfg.degrade.snr_min = d.value("snr_min", cfg.degrade.snr_min);
    cfg.degrade.snr_max = d.value("snr_max", cfg.degrade.snr_max);
    cfg.degrade.packet_drop_max_ms =
        d.value("packet_drop_max_ms", cfg.degrade.packet_drop_max_ms);
  }
  if (j.contains("gsr")) {
    const auto& g = j.at("gsr");
    if (g.contains("model")) {
      nlohmann::json merged = cfg.gsr.model.to_json();
      merged.update(g.at("model"));
      cfg.gsr.model = gsr::GsrConfig::from_json(merged);
    }
    if (g.contains("loss")) {
      nlohmann::json merged = cfg.gsr.loss.to_json();
      merged.update(g.at("loss"));
      cfg.gsr.loss = gsr::GsrLossConfig::from_json(merged);
    }
    if (g.contains("optimizer")) {
      cfg.gsr.optimizer = optimizer_from_json(g.at("optimizer"), cfg.gsr.optimizer);
    }
    cfg.gsr.crop_frames = g.value("crop_frames", cfg.gsr.crop_frames);
  }
  if (j.contains("conditioning")) {
    const auto& c = j.at("conditioning");
    cfg.conditioning.k_clusters = c.value("k_clusters", cfg.conditioning.k_clusters);
    if (c.contains("encoder")) {
      nlohmann::json merged = cfg.conditioning.encoder.to_json();
      merged.update(c.at("encoder"));
      cfg.conditioning.encoder = cond::ContentEncoderConfig::from_json(merged);
    }
    if (c.contains("speaker")) {
      nlohmann::json merged = cfg.conditioning.speaker.to_json();
      merged.update(c.at("speaker"));
      cfg.conditioning.speaker = cond::SpeakerEncoderConfig::from_json(merged);
    }
    if (c.contains("speaker_optimizer")) {
      cfg.conditioning.speaker_optimizer =
          optimizer_from_json(c.at("speaker_optimizer"), cfg.conditioning.speaker_optimizer);
    }
    cfg.conditioning.encoder.k_clusters = cfg.conditioning.k_clusters;
  }
  if (j.contains("diffusion")) {
    const auto& d = j.at("diffusion");
    if (d.contains("net")) {
      nlohmann::json merged = cfg.diffusion_cfg.net.to_json();
      merged.update(d.at("net"));
      cfg.diffusion_cfg.net = diffusion::ScoreNetConfig::from_json(merged);
    }
    if (d.contains("schedule")) {
      cfg.diffusion_cfg.schedule =
          diffusion::DiffusionSchedule::from_json(d.at("schedule"));
    }
    cfg.diffusion_cfg.alpha = d.value("alpha", cfg.diffusion_cfg.alpha);
    cfg.diffusion_cfg.t_min = d.value("t_min", cfg.diffusion_cfg.t_min);
    if (d.contains("optimizer")) {
      cfg.diffusion_cfg.optimizer =
          optimizer_from_json(d.at("optimizer"), cfg.diffusion_cfg.optimizer);
    }
    cfg.diffusion_cfg.crop_frames = d.value("crop_frames", cfg.diffusion_cfg.crop_frames);
  }
  if (j.contains("guidance")) {
    nlohmann::json merged = cfg.guidance.to_json();
    merged.update(j.at("guidance"));
    cfg.guidance = diffusion::GuidanceConfig::from_json(merged);
  }
  if (j.contains("vocoder")) {
    nlohmann::json merged = cfg.vocoder.to_json();
    merged.update(j.at("vocoder"));
    cfg.vocoder = pipeline::VocoderSpec::from_json(merged);
  }
  if (j.contains("eval") && j.at("eval").contains("metrics")) {
    cfg.eval.metrics = j.at("eval").at("metrics").get<std::vector<std::string>>();
  }
  if (j.contains("seeds")) {
    cfg.seeds.default_seed = j.at("seeds").value("default", cfg.seeds.default_seed);
  }

  // the spec pins these couplings
  cfg.conditioning.encoder.n_mels = cfg.mel.n_mels;
  cfg.diffusion_cfg.net.n_mels = cfg.mel.n_mels;
  cfg.diffusion_cfg.net.spk_dim = cfg.conditioning.speaker.embed_dim;
  cfg.gsr.model.n_mels = cfg.mel.n_mels;
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("unparsable config " + path + ": " + e.what());
  }
  return run_config_from_json(j);
}

}  // namespace cli
}  // namespace revoice
