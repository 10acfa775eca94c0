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

#ifndef REVOICE_EVAL_REPORT_H_
#define REVOICE_EVAL_REPORT_H_

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "revoice/cond/speaker_encoder.h"
#include "revoice/eval/manifest.h"
#include "revoice/eval/metrics.h"

namespace revoice {
namespace eval {

using EnhanceFn = std::function<AudioClip(const ManifestRow&)>;

struct SystemSpec {
  std::string name;
  EnhanceFn fn;
};

struct Aggregate {
  double mean = 0.0;
  double stddev = 0.0;
  int n = 0;
};

struct MetricReport {
  struct Row {
    std::string system;
    std::string utterance_id;
    std::string metric;
    double value;
  };
  std::vector<Row> rows;
  std::map<std::pair<std::string, std::string>, Aggregate> aggregates;
  std::vector<std::string> errors;  // rows skipped with reasons

  void recompute_aggregates();
  // columns (system, utterance_id, metric, value); one "mean" row per
  // (system, metric) after the per-utterance rows
  std::string to_csv() const;
  std::string render_table() const;
};

struct RunEvalOptions {
  MelConfig mel;
  const cond::SpeakerEncoder* speaker_encoder = nullptr;  // for spk_cos
  std::string mel_dump_dir;  // PGM + tensor dumps when non-empty
};

// Runs each system over the manifest and scores the output against the clean
// reference. Per-row failures are collected and the row skipped.
MetricReport run_eval(const Manifest& manifest, const std::vector<SystemSpec>& systems,
                      const std::vector<std::string>& metrics,
                      const RunEvalOptions& opts);

// External per-utterance scores, CSV columns (utterance_id, metric, value).
void merge_external_scores(MetricReport& report, const std::string& system,
                           const std::string& csv_path);

// 8-bit grey-map export, min..max normalized, plus the raw tensor container.
void write_mel_dumps(const MelSpectrogram& mel, const std::string& path_stem);

}  // namespace eval
}  // namespace revoice

#endif  // REVOICE_EVAL_REPORT_H_
