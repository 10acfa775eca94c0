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

#include "revoice/cli/cli.h"

#include <filesystem>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "revoice/audio/wav.h"
#include "revoice/cli/config.h"
#include "revoice/common/io.h"
#include "revoice/degrade/degrade.h"
#include "revoice/diffusion/train.h"
#include "revoice/eval/report.h"
#include "revoice/gsr/train.h"
#include "revoice/pipeline/enhance.h"

namespace revoice {
namespace cli {

namespace fs = std::filesystem;

namespace {

struct CommonArgs {
  std::string config_path;
  std::optional<uint64_t> seed;

  RunConfig load() const {
    return config_path.empty() ? RunConfig() : load_run_config(config_path);
  }
  uint64_t resolve_seed(const RunConfig& cfg) const {
    return seed.has_value() ? *seed : cfg.seeds.default_seed;
  }
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "run-config JSON path");
  cmd->add_option("--seed", args.seed, "seed overriding the config default");
}

void write_snapshot(const std::string& path, const std::string& command,
                    const std::vector<std::string>& argv, uint64_t seed,
                    const RunConfig& cfg) {
  nlohmann::json snap = {{"command", command},
                         {"argv", argv},
                         {"seed", seed},
                         {"config", run_config_to_json(cfg)}};
  write_file(path, snap.dump(2) + "\n");
}

std::string sibling_snapshot_path(const std::string& output_path) {
  return output_path + ".config.json";
}

std::vector<AudioClip> read_clips(const std::vector<std::string>& paths) {
  std::vector<AudioClip> clips;
  clips.reserve(paths.size());
  for (const std::string& p : paths) clips.push_back(read_wav(p));
  return clips;
}

eval::SystemSpec make_system(const std::string& name, const pipeline::ModelBundle& bundle,
                             const RunConfig& cfg, uint64_t seed) {
  if (name == "input") {
    return {"Input", [](const eval::ManifestRow& row) {
              if (row.degraded_path.empty()) {
                throw ConfigError("row " + row.utterance_id + " has no degraded_path");
              }
              return read_wav(row.degraded_path);
            }};
  }
  pipeline::EnhanceMode mode = pipeline::mode_from_string(name);
  (void)cfg;
  return {pipeline::mode_display_name(mode), [mode, &bundle, seed](const eval::ManifestRow& row) {
            if (row.degraded_path.empty()) {
              throw ConfigError("row " + row.utterance_id + " has no degraded_path");
            }
            AudioClip degraded = read_wav(row.degraded_path);
            std::vector<AudioClip> enrollment = read_clips(row.enrollment_paths);
            pipeline::EnhanceOptions opts;
            opts.seed = Rng::derive(seed, std::hash<std::string>{}(row.utterance_id));
            return pipeline::enhance(degraded, mode, bundle, enrollment, opts);
          }};
}

int run_degrade(const std::string& in_path, const std::string& spec_path,
                const std::string& out_path, const CommonArgs& common,
                const std::vector<std::string>& argv) {
  RunConfig cfg = common.load();
  degrade::DegradationSpec spec =
      degrade::DegradationSpec::from_json(nlohmann::json::parse(read_file(spec_path)));
  if (common.seed.has_value()) spec.seed = *common.seed;
  AudioClip clean = read_wav(in_path);
  auto [degraded, report] = degrade::apply_chain(clean, spec);
  write_wav(out_path, degraded);
  write_file(out_path + ".report.json", report.to_json().dump(2) + "\n");
  write_snapshot(sibling_snapshot_path(out_path), "degrade", argv, spec.seed, cfg);
  return 0;
}

int run_fit_codebook(const std::string& manifest_path, int k, const std::string& out_path,
                     const CommonArgs& common, const std::vector<std::string>& argv) {
  RunConfig cfg = common.load();
  const uint64_t seed = common.resolve_seed(cfg);
  eval::Manifest manifest = eval::Manifest::load_jsonl(manifest_path);
  manifest.validate();
  std::vector<nn::Tensor> features;
  for (const eval::ManifestRow& row : manifest.rows) {
    features.push_back(
        cond::cepstral_features(mel_spectrogram(read_wav(row.clean_path), cfg.mel)));
  }
  const int k_used = (k > 0) ? k : cfg.conditioning.k_clusters;
  cond::Codebook cb = cond::fit_codebook(features, k_used, seed);
  cb.save(out_path);
  write_snapshot(sibling_snapshot_path(out_path), "fit-codebook", argv, seed, cfg);
  return 0;
}

int run_train(const std::string& stage, const std::string& manifest_path,
              const std::string& outdir, const std::string& codebook_path,
              const std::string& speaker_path, const CommonArgs& common,
              const std::vector<std::string>& argv) {
  RunConfig cfg = common.load();
  const uint64_t seed = common.resolve_seed(cfg);
  eval::Manifest manifest = eval::Manifest::load_jsonl(manifest_path);
  manifest.validate();
  fs::create_directories(outdir);

  if (stage == "gsr") {
    gsr::GsrTrainOptions opts;
    opts.model = cfg.gsr.model;
    opts.loss = cfg.gsr.loss;
    opts.optimizer = cfg.gsr.optimizer;
    opts.mel = cfg.mel;
    opts.crop_frames = cfg.gsr.crop_frames;
    opts.seed = seed;
    opts.log_csv_path = outdir + "/gsr_train_log.csv";
    opts.checkpoint_path = outdir + "/gsr.ckpt";
    gsr::train_gsr(manifest, opts);
  } else if (stage == "speaker") {
    std::vector<cond::SpeakerTrainRow> rows;
    for (const eval::ManifestRow& row : manifest.rows) {
      rows.push_back({read_wav(row.clean_path), row.speaker_id});
    }
    cond::SpeakerEncoder enc(cfg.conditioning.speaker);
    train_speaker_encoder(enc, rows, cfg.mel, cfg.conditioning.speaker_optimizer, seed);
    enc.save(outdir + "/speaker_encoder.ckpt");
  } else if (stage == "vc") {
    const std::string cb_path =
        codebook_path.empty() ? outdir + "/codebook.ckpt" : codebook_path;
    const std::string spk_path =
        speaker_path.empty() ? outdir + "/speaker_encoder.ckpt" : speaker_path;
    cond::Codebook codebook = cond::Codebook::load(cb_path);
    cond::SpeakerEncoder spk_enc = cond::SpeakerEncoder::load(spk_path);

    diffusion::VcTrainOptions opts;
    opts.encoder = cfg.conditioning.encoder;
    opts.encoder.k_clusters = codebook.k;
    opts.net = cfg.diffusion_cfg.net;
    opts.optimizer = cfg.diffusion_cfg.optimizer;
    opts.loss.alpha = cfg.diffusion_cfg.alpha;
    opts.loss.t_min = cfg.diffusion_cfg.t_min;
    opts.loss.cfg_dropout = cfg.guidance.train_dropout;
    opts.schedule = cfg.diffusion_cfg.schedule;
    opts.mel = cfg.mel;
    opts.crop_frames = cfg.diffusion_cfg.crop_frames;
    opts.seed = seed;
    opts.log_csv_path = outdir + "/vc_train_log.csv";
    opts.encoder_ckpt = outdir + "/content_encoder.ckpt";
    opts.score_ckpt = outdir + "/score_net.ckpt";
    opts.mel_proj_ckpt = outdir + "/mel_proj.ckpt";
    diffusion::train_vc(manifest, codebook, spk_enc, opts);
    // keep the trained conditioning artifacts next to the decoder
    if (fs::absolute(cb_path) != fs::absolute(outdir + "/codebook.ckpt")) {
      fs::copy_file(cb_path, outdir + "/codebook.ckpt",
                    fs::copy_options::overwrite_existing);
    }
    if (fs::absolute(spk_path) != fs::absolute(outdir + "/speaker_encoder.ckpt")) {
      fs::copy_file(spk_path, outdir + "/speaker_encoder.ckpt",
                    fs::copy_options::overwrite_existing);
    }
  } else {
    throw ConfigError("unknown train stage: " + stage);
  }

  pipeline::write_bundle_manifest(outdir, cfg.mel, cfg.diffusion_cfg.schedule,
                                  cfg.guidance, cfg.vocoder);
  write_snapshot(outdir + "/train-" + stage + ".config.json", "train", argv, seed, cfg);
  return 0;
}

int run_enhance(const std::string& in_path, const std::string& mode_str,
                const std::string& bundle_dir, const std::string& out_path,
                const std::vector<std::string>& enroll_paths,
                const std::string& units_path, const std::string& utterance_id,
                const CommonArgs& common, const std::vector<std::string>& argv) {
  RunConfig cfg = common.load();
  const uint64_t seed = common.resolve_seed(cfg);
  pipeline::ModelBundle bundle = pipeline::load_bundle(bundle_dir);
  pipeline::EnhanceMode mode = pipeline::mode_from_string(mode_str);
  AudioClip input = read_wav(in_path);
  std::vector<AudioClip> enrollment = read_clips(enroll_paths);

  pipeline::EnhanceOptions opts;
  opts.seed = seed;
  std::vector<int> external_ids;
  if (!units_path.empty()) {
    const std::string key =
        utterance_id.empty() ? fs::path(in_path).stem().string() : utterance_id;
    for (const cond::ExternalUnits& u : cond::load_external_units(units_path)) {
      if (u.utterance_id == key) external_ids = u.ids;
    }
    if (external_ids.empty()) {
      throw ConfigError("no external units for utterance '" + key + "'");
    }
    opts.external_units = &external_ids;
  }

  AudioClip enhanced = pipeline::enhance(input, mode, bundle, enrollment, opts);
  write_wav(out_path, enhanced);
  write_snapshot(sibling_snapshot_path(out_path), "enhance", argv, seed, cfg);
  return 0;
}

int run_evaluate(const std::string& manifest_path, const std::string& bundle_dir,
                 const std::string& outdir, std::vector<std::string> systems,
                 const std::vector<std::string>& external,
                 const std::string& dump_mels, const CommonArgs& common,
                 const std::vector<std::string>& argv) {
  RunConfig cfg = common.load();
  const uint64_t seed = common.resolve_seed(cfg);
  eval::Manifest manifest = eval::Manifest::load_jsonl(manifest_path);
  pipeline::ModelBundle bundle = pipeline::load_bundle(bundle_dir);
  fs::create_directories(outdir);

  if (systems.empty()) systems = {"input", "gsr", "vc-mel", "vc-ssl", "gsr+vc"};
  std::vector<eval::SystemSpec> specs;
  for (const std::string& name : systems) {
    specs.push_back(make_system(name, bundle, cfg, seed));
  }

  eval::RunEvalOptions opts;
  opts.mel = cfg.mel;
  if (bundle.speaker_encoder) opts.speaker_encoder = &*bundle.speaker_encoder;
  if (!dump_mels.empty()) {
    fs::create_directories(dump_mels);
    opts.mel_dump_dir = dump_mels;
  }
  eval::MetricReport report = eval::run_eval(manifest, specs, cfg.eval.metrics, opts);
  for (const std::string& ext : external) {
    const size_t eq = ext.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("--external expects system=scores.csv");
    }
    eval::merge_external_scores(report, ext.substr(0, eq), ext.substr(eq + 1));
  }
  write_file(outdir + "/report.csv", report.to_csv());
  std::cout << report.render_table();
  write_snapshot(outdir + "/evaluate.config.json", "evaluate", argv, seed, cfg);
  for (const std::string& err : report.errors) {
    std::cerr << "[revoice] skipped: " << err << "\n";
  }
  return report.errors.empty() ? 0 : 2;
}

int run_ablate(const std::string& manifest_path, const std::string& bundle_dir,
               const std::string& outdir, const CommonArgs& common,
               const std::vector<std::string>& argv) {
  RunConfig cfg = common.load();
  const uint64_t seed = common.resolve_seed(cfg);
  eval::Manifest manifest = eval::Manifest::load_jsonl(manifest_path);
  pipeline::ModelBundle bundle = pipeline::load_bundle(bundle_dir);
  fs::create_directories(outdir);

  // the four fixed ablation rows
  std::vector<eval::SystemSpec> specs = {
      make_system("gsr", bundle, cfg, seed),
      make_system("vc-mel", bundle, cfg, seed),
      make_system("vc-ssl", bundle, cfg, seed),
      make_system("gsr+vc", bundle, cfg, seed),
  };
  eval::RunEvalOptions opts;
  opts.mel = cfg.mel;
  if (bundle.speaker_encoder) opts.speaker_encoder = &*bundle.speaker_encoder;
  eval::MetricReport report = eval::run_eval(manifest, specs, cfg.eval.metrics, opts);
  write_file(outdir + "/ablation.csv", report.to_csv());
  std::cout << report.render_table();
  write_snapshot(outdir + "/ablate.config.json", "ablate", argv, seed, cfg);
  for (const std::string& err : report.errors) {
    std::cerr << "[revoice] skipped: " << err << "\n";
  }
  return report.errors.empty() ? 0 : 2;
}

}  // namespace

int dispatch(const std::vector<std::string>& args) {
  CLI::App app{"two-stage speech restoration (generative restoration + "
               "diffusion voice conversion)"};
  app.require_subcommand(1);

  // degrade
  auto* degrade_cmd = app.add_subcommand("degrade", "apply a degradation chain");
  std::string d_in, d_spec, d_out;
  CommonArgs d_common;
  degrade_cmd->add_option("--in", d_in, "clean input WAV")->required();
  degrade_cmd->add_option("--spec", d_spec, "degradation spec JSON")->required();
  degrade_cmd->add_option("--out", d_out, "degraded output WAV")->required();
  add_common(degrade_cmd, d_common);

  // fit-codebook
  auto* fit_cmd = app.add_subcommand("fit-codebook", "k-means over content features");
  std::string f_manifest, f_out;
  int f_k = 0;
  CommonArgs f_common;
  fit_cmd->add_option("--manifest", f_manifest, "JSONL manifest of clean clips")->required();
  fit_cmd->add_option("--k", f_k, "cluster count (default from config)");
  fit_cmd->add_option("--out", f_out, "codebook checkpoint path")->required();
  add_common(fit_cmd, f_common);

  // train
  auto* train_cmd = app.add_subcommand("train", "train a stage");
  std::string t_stage, t_manifest, t_outdir, t_codebook, t_speaker;
  CommonArgs t_common;
  train_cmd->add_option("--stage", t_stage, "gsr | speaker | vc")
      ->required()
      ->check(CLI::IsMember({"gsr", "speaker", "vc"}));
  train_cmd->add_option("--manifest", t_manifest, "JSONL manifest")->required();
  train_cmd->add_option("--outdir", t_outdir, "output directory")->required();
  train_cmd->add_option("--codebook", t_codebook, "codebook checkpoint (vc stage)");
  train_cmd->add_option("--speaker-encoder", t_speaker,
                        "speaker encoder checkpoint (vc stage)");
  add_common(train_cmd, t_common);

  // enhance
  auto* enhance_cmd = app.add_subcommand("enhance", "restore one utterance");
  std::string e_in, e_mode, e_bundle, e_out, e_units, e_utt;
  std::vector<std::string> e_enroll;
  CommonArgs e_common;
  enhance_cmd->add_option("--in", e_in, "input WAV")->required();
  enhance_cmd->add_option("--mode", e_mode, "gsr | vc-mel | vc-ssl | gsr+vc")
      ->required()
      ->check(CLI::IsMember({"gsr", "vc-mel", "vc-ssl", "gsr+vc"}));
  enhance_cmd->add_option("--bundle", e_bundle, "model bundle directory")->required();
  enhance_cmd->add_option("--out", e_out, "output WAV")->required();
  enhance_cmd->add_option("--enroll", e_enroll, "clean enrollment WAVs");
  enhance_cmd->add_option("--units", e_units, "external unit JSONL (vc-ssl)");
  enhance_cmd->add_option("--utterance-id", e_utt, "key into --units");
  add_common(enhance_cmd, e_common);

  // evaluate
  auto* eval_cmd = app.add_subcommand("evaluate", "score systems over a manifest");
  std::string v_manifest, v_bundle, v_outdir, v_dump;
  std::vector<std::string> v_systems, v_external;
  CommonArgs v_common;
  eval_cmd->add_option("--manifest", v_manifest, "JSONL manifest")->required();
  eval_cmd->add_option("--bundle", v_bundle, "model bundle directory")->required();
  eval_cmd->add_option("--outdir", v_outdir, "report directory")->required();
  eval_cmd->add_option("--systems", v_systems,
                       "subset of: input gsr vc-mel vc-ssl gsr+vc");
  eval_cmd->add_option("--external", v_external, "system=scores.csv merges");
  eval_cmd->add_option("--dump-mels", v_dump, "directory for PGM/tensor mel dumps");
  add_common(eval_cmd, v_common);

  // ablate
  auto* ablate_cmd = app.add_subcommand("ablate", "fixed four-system ablation table");
  std::string a_manifest, a_bundle, a_outdir;
  CommonArgs a_common;
  ablate_cmd->add_option("--manifest", a_manifest, "JSONL manifest")->required();
  ablate_cmd->add_option("--bundle", a_bundle, "model bundle directory")->required();
  ablate_cmd->add_option("--outdir", a_outdir, "report directory")->required();
  add_common(ablate_cmd, a_common);

  std::vector<std::string> argv_copy = args;
  try {
    // CLI11 parses reversed argv without the program name
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      std::cout << app.help();
      return 0;
    }
    std::cerr << e.what() << "\n" << app.help();
    return 1;
  }

  try {
    if (degrade_cmd->parsed()) {
      return run_degrade(d_in, d_spec, d_out, d_common, argv_copy);
    }
    if (fit_cmd->parsed()) {
      return run_fit_codebook(f_manifest, f_k, f_out, f_common, argv_copy);
    }
    if (train_cmd->parsed()) {
      return run_train(t_stage, t_manifest, t_outdir, t_codebook, t_speaker, t_common,
                       argv_copy);
    }
    if (enhance_cmd->parsed()) {
      return run_enhance(e_in, e_mode, e_bundle, e_out, e_enroll, e_units, e_utt,
                         e_common, argv_copy);
    }
    if (eval_cmd->parsed()) {
      return run_evaluate(v_manifest, v_bundle, v_outdir, v_systems, v_external, v_dump,
                          v_common, argv_copy);
    }
    if (ablate_cmd->parsed()) {
      return run_ablate(a_manifest, a_bundle, a_outdir, a_common, argv_copy);
    }
    std::cerr << app.help();
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

int dispatch(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return dispatch(args);
}

}  // namespace cli
}  // namespace revoice
