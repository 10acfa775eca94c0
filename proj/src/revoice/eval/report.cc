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

#include "revoice/eval/report.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>

#include "revoice/audio/wav.h"
#include "revoice/common/io.h"
#include "revoice/nn/bridge.h"
#include "revoice/nn/checkpoint.h"

namespace revoice {
namespace eval {

void MetricReport::recompute_aggregates() {
  aggregates.clear();
  std::map<std::pair<std::string, std::string>, std::vector<double>> buckets;
  for (const Row& row : rows) {
    if (row.utterance_id == "mean") continue;
    buckets[{row.system, row.metric}].push_back(row.value);
  }
  for (const auto& [key, values] : buckets) {
    Aggregate agg;
    agg.n = static_cast<int>(values.size());
    double sum = 0.0;
    for (double v : values) sum += v;
    agg.mean = sum / agg.n;
    double var = 0.0;
    for (double v : values) var += (v - agg.mean) * (v - agg.mean);
    agg.stddev = agg.n > 1 ? std::sqrt(var / (agg.n - 1)) : 0.0;
    aggregates[key] = agg;
  }
}

std::string MetricReport::to_csv() const {
  std::ostringstream ss;
  ss << "system,utterance_id,metric,value\n";
  ss << std::setprecision(17);
  for (const Row& row : rows) {
    ss << row.system << "," << row.utterance_id << "," << row.metric << ","
       << row.value << "\n";
  }
  for (const auto& [key, agg] : aggregates) {
    ss << key.first << ",mean," << key.second << "," << agg.mean << "\n";
  }
  return ss.str();
}

std::string MetricReport::render_table() const {
  std::set<std::string> systems, metrics;
  for (const auto& [key, agg] : aggregates) {
    systems.insert(key.first);
    metrics.insert(key.second);
  }
  size_t name_w = 8;
  for (const std::string& s : systems) name_w = std::max(name_w, s.size() + 2);

  std::ostringstream ss;
  ss << std::left << std::setw(static_cast<int>(name_w)) << "system";
  for (const std::string& m : metrics) ss << std::setw(18) << m;
  ss << "\n";
  for (const std::string& s : systems) {
    ss << std::left << std::setw(static_cast<int>(name_w)) << s;
    for (const std::string& m : metrics) {
      auto it = aggregates.find({s, m});
      std::ostringstream cell;
      if (it != aggregates.end()) {
        cell << std::fixed << std::setprecision(3) << it->second.mean << " ± "
             << it->second.stddev;
      } else {
        cell << "-";
      }
      ss << std::setw(18) << cell.str();
    }
    ss << "\n";
  }
  return ss.str();
}

namespace {
AudioClip aligned_to(const AudioClip& ref, AudioClip est) {
  est.samples.resize(ref.samples.size(), 0.0f);
  return est;
}
}  // namespace

MetricReport run_eval(const Manifest& manifest, const std::vector<SystemSpec>& systems,
                      const std::vector<std::string>& metrics,
                      const RunEvalOptions& opts) {
  manifest.validate(/*check_files=*/true);
  MetricReport report;
  for (const SystemSpec& system : systems) {
    for (const ManifestRow& row : manifest.rows) {
      try {
        AudioClip clean = read_wav(row.clean_path);
        AudioClip output = system.fn(row);
        for (const std::string& metric : metrics) {
          double value = 0.0;
          if (metric == "lsd") {
            value = lsd(clean, output, opts.mel);
          } else if (metric == "si_sdr") {
            value = si_sdr(clean, aligned_to(clean, output));
          } else if (metric == "mel_l1") {
            value = mel_l1(mel_spectrogram(clean, opts.mel),
                           mel_spectrogram(aligned_to(clean, output), opts.mel));
          } else if (metric == "spk_cos") {
            if (opts.speaker_encoder == nullptr) {
              throw ConfigError("spk_cos metric needs a speaker encoder");
            }
            value = cosine(opts.speaker_encoder->embed(clean, opts.mel),
                           opts.speaker_encoder->embed(output, opts.mel));
          } else {
            throw ConfigError("unknown metric: " + metric);
          }
          report.rows.push_back({system.name, row.utterance_id, metric, value});
        }
        if (!opts.mel_dump_dir.empty()) {
          write_mel_dumps(mel_spectrogram(output, opts.mel),
                          opts.mel_dump_dir + "/" + row.utterance_id + "_" + system.name);
        }
      } catch (const Error& e) {
        report.errors.push_back(system.name + "/" + row.utterance_id + ": " + e.what());
      }
    }
  }
  report.recompute_aggregates();
  return report;
}

void merge_external_scores(MetricReport& report, const std::string& system,
                           const std::string& csv_path) {
  std::istringstream ss(read_file(csv_path));
  std::string line;
  bool first = true;
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    if (first) {  // tolerate a header row
      first = false;
      if (line.find("utterance_id") != std::string::npos) continue;
    }
    std::istringstream ls(line);
    std::string utt, metric, value;
    if (!std::getline(ls, utt, ',') || !std::getline(ls, metric, ',') ||
        !std::getline(ls, value)) {
      throw ConfigError("bad external score line: " + line);
    }
    report.rows.push_back({system, utt, metric, std::stod(value)});
  }
  report.recompute_aggregates();
}

void write_mel_dumps(const MelSpectrogram& mel, const std::string& path_stem) {
  // PGM: frames along x, mel bands along y (low bands at the bottom)
  float lo = mel.values[0], hi = mel.values[0];
  for (float v : mel.values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const float span = (hi > lo) ? hi - lo : 1.0f;
  std::ostringstream pgm;
  pgm << "P5\n" << mel.frames << " " << mel.n_mels << "\n255\n";
  for (int m = mel.n_mels - 1; m >= 0; --m) {
    for (int f = 0; f < mel.frames; ++f) {
      const int g = static_cast<int>(std::lround(255.0f * (mel.at(f, m) - lo) / span));
      pgm << static_cast<char>(std::clamp(g, 0, 255));
    }
  }
  write_file(path_stem + ".pgm", pgm.str());

  nn::Tensor t = nn::mel_to_tensor(mel);
  nn::save_checkpoint(path_stem + ".rvt", {{"kind", "mel_dump"}}, {{"mel", &t}});
}

}  // namespace eval
}  // namespace revoice
