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

#include "testutil/toy_speech.h"

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <filesystem>

#include "revoice/audio/wav.h"
#include "revoice/common/rng.h"

namespace revoice {
namespace testutil {

namespace {
constexpr double kPi = 3.14159265358979323846;

struct SpeakerProfile {
  double f0;
  double formant_scale;
};

const SpeakerProfile kProfiles[kToySpeakers] = {
    {110.0, 1.00}, {146.0, 1.12}, {196.0, 0.88}, {262.0, 1.05}};

// two-pole resonator applied in place
void resonate(std::vector<double>& x, double freq, double bw, int sr) {
  const double r = std::exp(-kPi * bw / sr);
  const double theta = 2.0 * kPi * freq / sr;
  const double a1 = 2.0 * r * std::cos(theta);
  const double a2 = -r * r;
  const double gain = (1.0 - r) * std::sqrt(1.0 - 2.0 * r * std::cos(2 * theta) + r * r);
  double y1 = 0.0, y2 = 0.0;
  for (double& v : x) {
    const double y = gain * v + a1 * y1 + a2 * y2;
    y2 = y1;
    y1 = y;
    v = y;
  }
}
}  // namespace

AudioClip toy_utterance(int speaker, double duration_s, uint64_t seed) {
  const SpeakerProfile& prof = kProfiles[speaker % kToySpeakers];
  Rng rng(seed);
  const int sr = kSampleRate;
  const int total = std::max(1, static_cast<int>(std::lround(duration_s * sr)));
  std::vector<double> out(static_cast<size_t>(total), 0.0);

  int pos = 0;
  while (pos < total) {
    const int syl_len = static_cast<int>(rng.uniform_int(sr * 90 / 1000, sr * 160 / 1000));
    const int gap_len = static_cast<int>(rng.uniform_int(sr * 15 / 1000, sr * 40 / 1000));
    const int len = std::min(syl_len, total - pos);
    if (len <= 8) break;

    std::vector<double> seg(static_cast<size_t>(len), 0.0);
    const bool voiced = rng.uniform() > 0.25;
    if (voiced) {
      const double f0 = prof.f0 * (1.0 + 0.04 * (rng.uniform() - 0.5));
      double phase = rng.uniform();  // pulse-train phase in periods
      for (int i = 0; i < len; ++i) {
        phase += f0 / sr;
        if (phase >= 1.0) {
          phase -= 1.0;
          seg[static_cast<size_t>(i)] = 1.0;
        }
      }
      const double f1 = prof.formant_scale * rng.uniform(320.0, 820.0);
      const double f2 = prof.formant_scale * rng.uniform(1000.0, 2300.0);
      std::vector<double> low = seg;
      resonate(low, f1, 110.0, sr);
      resonate(seg, f2, 160.0, sr);
      for (int i = 0; i < len; ++i) {
        seg[static_cast<size_t>(i)] = 8.0 * low[static_cast<size_t>(i)] +
                                      5.0 * seg[static_cast<size_t>(i)];
      }
    } else {
      for (double& v : seg) v = rng.normal() * 0.15;
      resonate(seg, prof.formant_scale * rng.uniform(2800.0, 5200.0), 900.0, sr);
      for (double& v : seg) v *= 4.0;
    }
    // raised-cosine syllable envelope
    for (int i = 0; i < len; ++i) {
      const double w = 0.5 - 0.5 * std::cos(2.0 * kPi * i / len);
      out[static_cast<size_t>(pos + i)] += seg[static_cast<size_t>(i)] * w;
    }
    pos += len + gap_len;
  }

  double peak = 1e-9;
  for (double v : out) peak = std::max(peak, std::abs(v));
  AudioClip clip;
  clip.samples.resize(out.size());
  for (size_t i = 0; i < out.size(); ++i) {
    clip.samples[i] = static_cast<float>(out[i] / peak * 0.5);
  }
  return clip;
}

std::string fresh_dir(const std::string& tag) {
  static std::atomic<int> counter{0};
  const std::string dir =
      (std::filesystem::temp_directory_path() /
       ("revoice_test_" + tag + "_" + std::to_string(counter++) + "_" +
        std::to_string(::getpid())))
          .string();
  std::filesystem::create_directories(dir);
  return dir;
}

eval::Manifest make_toy_corpus(const std::string& dir, const ToyCorpusOptions& opts) {
  std::filesystem::create_directories(dir);
  eval::Manifest manifest;
  for (int spk = 0; spk < kToySpeakers; ++spk) {
    const std::string spk_id = "spk" + std::to_string(spk);
    std::vector<std::string> enrollment;
    for (int e = 0; e < opts.enrollment_per_speaker; ++e) {
      const std::string path = dir + "/" + spk_id + "_enroll" + std::to_string(e) + ".wav";
      write_wav(path, toy_utterance(spk, opts.duration_s,
                                    Rng::derive(opts.seed, 1000 + spk * 100 + e)));
      enrollment.push_back(path);
    }
    for (int u = 0; u < opts.utterances_per_speaker; ++u) {
      const std::string utt_id = spk_id + "_utt" + std::to_string(u);
      const std::string path = dir + "/" + utt_id + ".wav";
      write_wav(path, toy_utterance(spk, opts.duration_s,
                                    Rng::derive(opts.seed, spk * 100 + u)));
      eval::ManifestRow row;
      row.utterance_id = utt_id;
      row.clean_path = path;
      row.speaker_id = spk_id;
      row.enrollment_paths = enrollment;
      manifest.rows.push_back(std::move(row));
    }
  }
  return manifest;
}

eval::Manifest degrade_corpus(const eval::Manifest& clean, const std::string& dir,
                              const std::vector<degrade::OpSpec>& ops, uint64_t seed) {
  std::filesystem::create_directories(dir);
  eval::Manifest out = clean;
  for (size_t i = 0; i < out.rows.size(); ++i) {
    degrade::DegradationSpec spec;
    spec.ops = ops;
    spec.seed = Rng::derive(seed, i);
    AudioClip clean_clip = read_wav(out.rows[i].clean_path);
    auto [degraded, report] = degrade::apply_chain(clean_clip, spec);
    const std::string path = dir + "/" + out.rows[i].utterance_id + "_degraded.wav";
    write_wav(path, degraded);
    out.rows[i].degraded_path = path;
  }
  return out;
}

}  // namespace testutil
}  // namespace revoice
