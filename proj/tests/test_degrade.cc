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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>

#include "doctest.h"
#include "revoice/audio/snr.h"
#include "revoice/audio/stft.h"
#include "revoice/common/error.h"
#include "revoice/common/rng.h"
#include "revoice/degrade/degrade.h"
#include "testutil/toy_speech.h"

using namespace revoice;
using namespace revoice::degrade;

namespace {

AudioClip sine(double freq, double seconds, double amp = 0.5) {
  AudioClip clip;
  const int n = static_cast<int>(seconds * kSampleRate);
  clip.samples.resize(n);
  for (int i = 0; i < n; ++i) {
    clip.samples[i] =
        static_cast<float>(amp * std::sin(2.0 * M_PI * freq * i / kSampleRate));
  }
  return clip;
}

double rms(const AudioClip& c) {
  return std::sqrt(signal_energy(c) / static_cast<double>(c.samples.size()));
}

// FFT energy above a frequency bound
double energy_above(const AudioClip& clip, double hz) {
  Spectrogram spec = stft(clip.samples, 1024, 256, 1024);
  const double bin_hz = 16000.0 / 1024.0;
  double acc = 0.0;
  for (int f = 0; f < spec.frames; ++f) {
    for (int b = static_cast<int>(std::ceil(hz / bin_hz)); b < spec.bins; ++b) {
      acc += std::norm(spec.at(f, b));
    }
  }
  return acc;
}

}  // namespace

TEST_CASE("mix_at_snr hits the requested SNR exactly") {
  AudioClip clean = testutil::toy_utterance(0, 1.0, 5);
  AudioClip noise = white_noise(clean.samples.size(), 7);
  for (double target : {-15.0, -3.0, 0.0, 12.5, 40.0}) {
    nlohmann::json realized;
    mix_at_snr(clean, noise, target, 3, &realized);
    CHECK(std::abs(realized.at("realized_snr_db").get<double>() - target) < 1e-6);
  }
}

TEST_CASE("mix_at_snr rejects out-of-range SNR") {
  AudioClip clean = sine(440.0, 0.2);
  AudioClip noise = white_noise(clean.samples.size(), 1);
  CHECK_THROWS_AS(mix_at_snr(clean, noise, 45.0, 0, nullptr), SnrOutOfRange);
  CHECK_THROWS_AS(mix_at_snr(clean, noise, -16.0, 0, nullptr), SnrOutOfRange);
}

TEST_CASE("mix_at_snr over random triples matches the measure_snr oracle") {
  Rng rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    AudioClip clean = testutil::toy_utterance(trial % 4, 0.5, rng.next_u64());
    AudioClip noise = white_noise(clean.samples.size() / 2 + 17, rng.next_u64());
    const double target = rng.uniform(-15.0, 40.0);
    nlohmann::json realized;
    mix_at_snr(clean, noise, target, rng.next_u64(), &realized);
    CHECK(std::abs(realized.at("realized_snr_db").get<double>() - target) < 1e-6);
  }
}

TEST_CASE("packet_drop identities") {
  AudioClip clip = testutil::toy_utterance(1, 0.5, 11);
  AudioClip same = packet_drop(clip, 0, 100.0, 42, nullptr);
  CHECK(same.samples == clip.samples);
  AudioClip same2 = packet_drop(clip, 5, 0.0, 42, nullptr);
  CHECK(same2.samples == clip.samples);
  CHECK_THROWS_AS(packet_drop(clip, 2, 150.0, 1, nullptr), ParamOutOfRange);
}

TEST_CASE("packet_drop zero runs match the reported segments") {
  AudioClip clip = testutil::toy_utterance(2, 1.0, 13);
  // avoid natural zeros confusing the scan
  for (float& s : clip.samples) {
    if (s == 0.0f) s = 1e-4f;
  }
  nlohmann::json realized;
  AudioClip dropped = packet_drop(clip, 2, 100.0, 7, &realized);

  // oracle: scan for maximal zero runs not present in the input
  std::vector<std::pair<int64_t, int64_t>> runs;
  int64_t start = -1;
  for (int64_t i = 0; i < dropped.num_samples(); ++i) {
    const bool z = dropped.samples[i] == 0.0f;
    if (z && start < 0) start = i;
    if (!z && start >= 0) {
      runs.push_back({start, i - start});
      start = -1;
    }
  }
  if (start >= 0) runs.push_back({start, dropped.num_samples() - start});

  // merge reported segments (drops may touch or overlap)
  std::vector<std::pair<int64_t, int64_t>> expected;
  for (const auto& seg : realized.at("segments")) {
    const int64_t s = seg.at("start").get<int64_t>();
    const int64_t l = seg.at("len").get<int64_t>();
    if (l > 0) expected.push_back({s, l});
  }
  std::sort(expected.begin(), expected.end());
  std::vector<std::pair<int64_t, int64_t>> merged;
  for (const auto& [s, l] : expected) {
    if (!merged.empty() && s <= merged.back().first + merged.back().second) {
      merged.back().second =
          std::max(merged.back().second, s + l - merged.back().first);
    } else {
      merged.push_back({s, l});
    }
  }
  CHECK(runs == merged);

  // non-dropped samples are bit-identical
  size_t touched = 0;
  for (const auto& [s, l] : merged) touched += static_cast<size_t>(l);
  size_t diffs = 0;
  for (int64_t i = 0; i < clip.num_samples(); ++i) {
    if (clip.samples[i] != dropped.samples[i]) ++diffs;
  }
  CHECK(diffs <= touched);
  for (int64_t i = 0; i < clip.num_samples(); ++i) {
    bool in_drop = false;
    for (const auto& [s, l] : merged) in_drop = in_drop || (i >= s && i < s + l);
    if (!in_drop) CHECK(clip.samples[i] == dropped.samples[i]);
  }
}

TEST_CASE("clip threshold 1.0 is the identity") {
  AudioClip clip = testutil::toy_utterance(3, 0.3, 21);
  AudioClip out = clip_distort(clip, 1.0, nullptr);
  CHECK(out.samples == clip.samples);
  CHECK_THROWS_AS(clip_distort(clip, 0.0, nullptr), ParamOutOfRange);
  CHECK_THROWS_AS(clip_distort(clip, 1.5, nullptr), ParamOutOfRange);
}

TEST_CASE("band_limit kills a tone above the cutoff") {
  AudioClip tone = sine(4000.0, 0.5);
  AudioClip filtered = band_limit(tone, 2000.0, nullptr);
  CHECK(rms(filtered) < 0.001 * rms(tone));
}

TEST_CASE("band_limit stop-band attenuation is at least 60 dB above 1.2*cutoff") {
  AudioClip wide = white_noise(16000, 3);
  AudioClip filtered = band_limit(wide, 2000.0, nullptr);
  const double before = energy_above(wide, 1.2 * 2000.0);
  const double after = energy_above(filtered, 1.2 * 2000.0);
  CHECK(10.0 * std::log10(before / after) > 60.0);
}

TEST_CASE("codec round trip error stays under the companding bound") {
  AudioClip clip = testutil::toy_utterance(0, 0.4, 33);
  for (int bits : {4, 8, 16}) {
    AudioClip coded = codec_artifact(clip, bits, nullptr);
    const double bound = codec_error_bound(bits);
    for (size_t i = 0; i < clip.samples.size(); ++i) {
      CHECK(std::abs(static_cast<double>(coded.samples[i]) - clip.samples[i]) <= bound);
    }
  }
  CHECK_THROWS_AS(codec_artifact(clip, 3, nullptr), ParamOutOfRange);
  CHECK_THROWS_AS(codec_artifact(clip, 17, nullptr), ParamOutOfRange);
}

TEST_CASE("reverberate keeps length and rejects bad rt60") {
  AudioClip clip = testutil::toy_utterance(1, 0.4, 44);
  AudioClip wet = reverberate(clip, 0.3, 5, nullptr);
  CHECK(wet.samples.size() == clip.samples.size());
  CHECK_THROWS_AS(reverberate(clip, 0.0, 5, nullptr), ParamOutOfRange);
}

TEST_CASE("apply_chain: empty spec is identity with empty report") {
  AudioClip clip = testutil::toy_utterance(0, 0.3, 55);
  DegradationSpec spec;
  spec.seed = 9;
  auto [out, report] = apply_chain(clip, spec);
  CHECK(out.samples == clip.samples);
  CHECK(report.ops.empty());
}

TEST_CASE("apply_chain is deterministic and replayable from its report") {
  AudioClip clip = testutil::toy_utterance(2, 0.6, 66);
  DegradationSpec spec;
  spec.seed = 31337;
  spec.ops = {
      {"band_limit", {{"cutoff_hz", 4000.0}}},
      {"mix_noise", {{"snr_db", 5.0}, {"noise", "white"}}},
      {"packet_drop", {{"n_drops", 3}, {"max_len_ms", 80.0}}},
  };
  auto [out1, report1] = apply_chain(clip, spec);
  auto [out2, report2] = apply_chain(clip, spec);
  CHECK(out1.samples == out2.samples);
  CHECK(report1.to_json() == report2.to_json());

  AudioClip replayed = replay_chain(clip, report1);
  CHECK(replayed.samples == out1.samples);

  // spec JSON round trip preserves the transformation
  DegradationSpec spec2 = DegradationSpec::from_json(spec.to_json());
  auto [out3, report3] = apply_chain(clip, spec2);
  CHECK(out3.samples == out1.samples);
}

TEST_CASE("apply_chain validation reports the failing operator index") {
  AudioClip clip = testutil::toy_utterance(0, 0.2, 77);
  DegradationSpec spec;
  spec.ops = {{"clip", {{"threshold", 0.5}}}, {"codec", {{"bits", 99}}}};
  try {
    apply_chain(clip, spec);
    FAIL("expected ParamOutOfRange");
  } catch (const ParamOutOfRange& e) {
    CHECK(std::string(e.what()).find("ops[1]") != std::string::npos);
  }
}
