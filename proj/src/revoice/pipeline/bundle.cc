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

#include "revoice/pipeline/bundle.h"

#include <filesystem>
#include <iostream>

#include "revoice/common/io.h"
#include "revoice/nn/checkpoint.h"

namespace revoice {
namespace pipeline {

namespace fs = std::filesystem;

nlohmann::json mel_config_to_json(const MelConfig& cfg) {
  return {{"sample_rate", cfg.sample_rate}, {"win_length", cfg.win_length},
          {"hop_length", cfg.hop_length},   {"n_fft", cfg.n_fft},
          {"n_mels", cfg.n_mels},           {"fmin", cfg.fmin},
          {"fmax", cfg.fmax},               {"log_floor", cfg.log_floor}};
}

MelConfig mel_config_from_json(const nlohmann::json& j) {
  MelConfig cfg;
  cfg.sample_rate = j.value("sample_rate", 16000);
  cfg.win_length = j.value("win_length", 1024);
  cfg.hop_length = j.value("hop_length", 256);
  cfg.n_fft = j.value("n_fft", 1024);
  cfg.n_mels = j.value("n_mels", 80);
  cfg.fmin = j.value("fmin", 0.0);
  cfg.fmax = j.value("fmax", 8000.0);
  cfg.log_floor = j.value("log_floor", 1e-5);
  validate_mel_config(cfg);
  return cfg;
}

namespace {
std::string ckpt_hash(const std::string& path) {
  return nn::load_checkpoint(path).config_hash;
}
}  // namespace

void write_bundle_manifest(const std::string& dir, const MelConfig& mel,
                           const diffusion::DiffusionSchedule& schedule,
                           const diffusion::GuidanceConfig& guidance,
                           const VocoderSpec& vocoder) {
  nlohmann::json components = nlohmann::json::object();
  static const char* kKnown[] = {"gsr",       "codebook",        "content_encoder",
                                 "score_net", "speaker_encoder", "mel_proj"};
  for (const char* name : kKnown) {
    const std::string file = std::string(name) + ".ckpt";
    if (fs::exists(dir + "/" + file)) {
      components[name] = {{"file", file}, {"config_hash", ckpt_hash(dir + "/" + file)}};
    }
  }
  nlohmann::json manifest = {{"format_version", kBundleFormatVersion},
                             {"mel_config", mel_config_to_json(mel)},
                             {"schedule", schedule.to_json()},
                             {"guidance", guidance.to_json()},
                             {"vocoder", vocoder.to_json()},
                             {"components", components}};
  write_file(dir + "/bundle.json", manifest.dump(2) + "\n");
}

void save_bundle(const ModelBundle& bundle, const std::string& dir) {
  fs::create_directories(dir);
  nlohmann::json components = nlohmann::json::object();
  auto put = [&](const std::string& name, const std::string& file) {
    components[name] = {{"file", file}, {"config_hash", ckpt_hash(dir + "/" + file)}};
  };

  if (bundle.gsr) {
    bundle.gsr->save(dir + "/gsr.ckpt");
    put("gsr", "gsr.ckpt");
  }
  if (bundle.codebook) {
    bundle.codebook->save(dir + "/codebook.ckpt");
    put("codebook", "codebook.ckpt");
  }
  if (bundle.content_encoder) {
    bundle.content_encoder->save(dir + "/content_encoder.ckpt");
    put("content_encoder", "content_encoder.ckpt");
  }
  if (bundle.score_net) {
    bundle.score_net->save(dir + "/score_net.ckpt");
    put("score_net", "score_net.ckpt");
  }
  if (bundle.speaker_encoder) {
    bundle.speaker_encoder->save(dir + "/speaker_encoder.ckpt");
    put("speaker_encoder", "speaker_encoder.ckpt");
  }
  if (bundle.mel_proj) {
    bundle.mel_proj->save(dir + "/mel_proj.ckpt");
    put("mel_proj", "mel_proj.ckpt");
  }

  nlohmann::json manifest = {{"format_version", kBundleFormatVersion},
                             {"mel_config", mel_config_to_json(bundle.mel_config)},
                             {"schedule", bundle.schedule.to_json()},
                             {"guidance", bundle.guidance.to_json()},
                             {"vocoder", bundle.vocoder.to_json()},
                             {"components", components}};
  write_file(dir + "/bundle.json", manifest.dump(2) + "\n");
}

ModelBundle load_bundle(const std::string& dir) {
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(read_file(dir + "/bundle.json"));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("unparsable bundle.json in " + dir + ": " + e.what());
  }
  const int version = manifest.value("format_version", -1);
  if (version != kBundleFormatVersion) {
    throw VersionMismatch("bundle format_version " + std::to_string(version));
  }

  ModelBundle bundle;
  bundle.mel_config = mel_config_from_json(manifest.at("mel_config"));
  bundle.schedule = diffusion::DiffusionSchedule::from_json(manifest.at("schedule"));
  bundle.guidance = diffusion::GuidanceConfig::from_json(manifest.at("guidance"));
  bundle.vocoder = VocoderSpec::from_json(manifest.at("vocoder"));

  const nlohmann::json& components = manifest.at("components");
  auto locate = [&](const char* name) -> std::string {
    if (!components.contains(name)) return "";
    const std::string path = dir + "/" + components.at(name).at("file").get<std::string>();
    if (!fs::exists(path)) {
      std::cerr << "[revoice] bundle component missing on disk: " << path << "\n";
      return "";
    }
    const std::string expected = components.at(name).at("config_hash").get<std::string>();
    if (ckpt_hash(path) != expected) {
      throw VersionMismatch("bundle component " + std::string(name) +
                            " does not match recorded config hash");
    }
    return path;
  };

  if (std::string p = locate("gsr"); !p.empty()) bundle.gsr = gsr::GsrModel::load(p);
  if (std::string p = locate("codebook"); !p.empty()) bundle.codebook = cond::Codebook::load(p);
  if (std::string p = locate("content_encoder"); !p.empty()) {
    bundle.content_encoder = cond::ContentEncoder::load(p);
  }
  if (std::string p = locate("score_net"); !p.empty()) {
    bundle.score_net = diffusion::ScoreNetwork::load(p);
  }
  if (std::string p = locate("speaker_encoder"); !p.empty()) {
    bundle.speaker_encoder = cond::SpeakerEncoder::load(p);
  }
  if (std::string p = locate("mel_proj"); !p.empty()) {
    bundle.mel_proj = cond::MelProjection::load(p);
  }
  return bundle;
}

}  // namespace pipeline
}  // namespace revoice
