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
#include <filesystem>

#include "doctest.h"
#include "revoice/audio/mel.h"
#include "revoice/audio/snr.h"
#include "revoice/audio/stft.h"
#include "revoice/audio/wav.h"
#include "revoice/common/error.h"
#include "revoice/common/io.h"
#include "revoice/common/rng.h"
#include "revoice/eval/metrics.h"
#include "testutil/toy_speech.h"

using namespace revoice;

namespace {

AudioClip sine(double freq, double seconds, double amp = 1.0) {
  AudioClip clip;
  const int n = static_cast<int>(seconds * kSampleRate);
  clip.samples.resize(n);
  for (int i = 0; i < n; ++i) {
    clip.samples[i] =
        static_cast<float>(amp * std::sin(2.0 * M_PI * freq * i / kSampleRate));
  }
  return clip;
}

AudioClip noise_clip(int n, uint64_t seed, double amp = 0.3) {
  Rng rng(seed);
  AudioClip clip;
  clip.samples.resize(n);
  for (int i = 0; i < n; ++i) clip.samples[i] = static_cast<float>(rng.normal() * amp);
  return clip;
}

// independent scalar HTK mel formula for the oracle
double mel_of_hz(double f) { return 2595.0 * std::log10(1.0 + f / 700.0); }
double hz_of_mel(double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); }

}  // namespace

TEST_CASE("mel frame count for a one-second clip") {
  MelConfig cfg;
  MelSpectrogram mel = mel_spectrogram(sine(440.0, 1.0), cfg);
  CHECK(mel.frames == 63);  // 1 + floor(16000/256)
  CHECK(mel.n_mels == 80);
}

TEST_CASE("mel of silence is the log floor everywhere") {
  AudioClip zero;
  zero.samples.assign(16000, 0.0f);
  MelSpectrogram mel = mel_spectrogram(zero, MelConfig());
  const float expected = static_cast<float>(std::log(1e-5));
  for (float v : mel.values) CHECK(v == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("440 Hz tone peaks in the mel band nearest 440 Hz") {
  MelConfig cfg;
  MelSpectrogram mel = mel_spectrogram(sine(440.0, 1.0), cfg);

  // oracle: centers from the scalar mel formula
  const double mel_lo = mel_of_hz(cfg.fmin);
  const double mel_hi = mel_of_hz(cfg.fmax);
  int nearest = -1;
  double best = 1e18;
  for (int m = 0; m < cfg.n_mels; ++m) {
    const double center =
        hz_of_mel(mel_lo + (mel_hi - mel_lo) * (m + 1) / (cfg.n_mels + 1));
    if (std::abs(center - 440.0) < best) {
      best = std::abs(center - 440.0);
      nearest = m;
    }
  }
  for (int f = 0; f < mel.frames; ++f) {
    int argmax = 0;
    for (int m = 1; m < cfg.n_mels; ++m) {
      if (mel.at(f, m) > mel.at(f, argmax)) argmax = m;
    }
    CHECK(argmax == nearest);
  }
}

TEST_CASE("frame-count formula holds over a randomized length sweep") {
  MelConfig cfg;
  Rng rng(42);
  for (int trial = 0; trial < 40; ++trial) {
    const int t = static_cast<int>(rng.uniform_int(1, 10 * 16000));
    AudioClip clip = noise_clip(t, 77 + trial);
    MelSpectrogram mel = mel_spectrogram(clip, cfg);
    CHECK(mel.frames == 1 + t / cfg.hop_length);
  }
}

TEST_CASE("mel is scale-monotone above the floor") {
  MelConfig cfg;
  AudioClip clip = noise_clip(8000, 5, 0.05);
  MelSpectrogram a = mel_spectrogram(clip, cfg);
  AudioClip louder = clip;
  for (float& s : louder.samples) s *= 3.0f;
  MelSpectrogram b = mel_spectrogram(louder, cfg);
  const float floor_value = static_cast<float>(std::log(cfg.log_floor));
  for (size_t i = 0; i < a.values.size(); ++i) {
    if (a.values[i] > floor_value + 1e-6f) {
      CHECK(b.values[i] >= a.values[i] - 1e-5f);
    }
  }
}

TEST_CASE("mel input validation") {
  CHECK_THROWS_AS(mel_spectrogram(AudioClip{}, MelConfig()), EmptyAudio);
  AudioClip wrong_rate = sine(440.0, 0.1);
  wrong_rate.sample_rate = 8000;
  CHECK_THROWS_AS(mel_spectrogram(wrong_rate, MelConfig()), SampleRateMismatch);
}

TEST_CASE("griffin-lim round trip of a 440 Hz tone meets the SI-SDR floor") {
  AudioClip tone = sine(440.0, 1.0);
  MelSpectrogram mel = mel_spectrogram(tone, MelConfig());
  AudioClip rec = griffin_lim(mel, 64, 17);
  AudioClip ref = tone;
  ref.samples.resize(rec.samples.size());
  const double sdr = eval::si_sdr(ref, rec);
  // regression floor measured once at implementation time (target > 10 dB)
  CHECK(sdr > 10.0);
}

TEST_CASE("griffin-lim of an all-floor mel is near silence") {
  AudioClip zero;
  zero.samples.assign(16000, 0.0f);
  MelSpectrogram mel = mel_spectrogram(zero, MelConfig());
  AudioClip out = griffin_lim(mel, 8, 3);
  float peak = 0.0f;
  for (float s : out.samples) peak = std::max(peak, std::abs(s));
  CHECK(peak < 1e-2f);
}

TEST_CASE("griffin-lim determinism and output length") {
  AudioClip tone = sine(300.0, 0.4);
  MelSpectrogram mel = mel_spectrogram(tone, MelConfig());
  AudioClip a = griffin_lim(mel, 12, 99);
  AudioClip b = griffin_lim(mel, 12, 99);
  REQUIRE(a.samples.size() == b.samples.size());
  for (size_t i = 0; i < a.samples.size(); ++i) CHECK(a.samples[i] == b.samples[i]);
  // length within one hop of the source
  const int64_t t = tone.num_samples();
  CHECK(std::llabs(static_cast<long long>(a.samples.size()) - t) <= 256);
}

TEST_CASE("snr arithmetic") {
  AudioClip s = sine(200.0, 0.25, 0.5);
  AudioClip n = s;  // identical energy
  CHECK(measure_snr(s, n) == doctest::Approx(0.0).epsilon(1e-12));

  AudioClip n10 = s;
  for (float& v : n10.samples) v *= static_cast<float>(std::sqrt(0.1));
  CHECK(measure_snr(s, n10) == doctest::Approx(10.0).epsilon(1e-5));

  AudioClip zero = s;
  for (float& v : zero.samples) v = 0.0f;
  CHECK_THROWS_AS(measure_snr(s, zero), ZeroNoise);
  AudioClip shorter = s;
  shorter.samples.pop_back();
  CHECK_THROWS_AS(measure_snr(s, shorter), LengthMismatch);

  CHECK(scale_noise_to_snr(s, n, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(scale_noise_to_snr(s, n, 20.0) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK_THROWS_AS(scale_noise_to_snr(zero, n, 0.0), ZeroSignal);
  CHECK_THROWS_AS(scale_noise_to_snr(s, zero, 0.0), ZeroNoise);
}

TEST_CASE("snr round trip is accurate to 1e-6 dB over random pairs") {
  Rng rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const int t = static_cast<int>(rng.uniform_int(1000, 20000));
    AudioClip s = noise_clip(t, rng.next_u64(), 0.4);
    AudioClip n = noise_clip(t, rng.next_u64(), 0.2);
    const double target = rng.uniform(-15.0, 40.0);
    const double gain = scale_noise_to_snr(s, n, target);
    AudioClip scaled = n;
    for (float& v : scaled.samples) v = static_cast<float>(gain * v);
    CHECK(std::abs(measure_snr(s, scaled) - target) < 1e-6);
  }
}

TEST_CASE("wav round trip and format rejection") {
  const std::string dir = testutil::fresh_dir("wav");
  AudioClip clip = noise_clip(5000, 9, 0.5);
  const std::string path = dir + "/clip.wav";
  write_wav(path, clip);
  AudioClip loaded = read_wav(path);
  REQUIRE(loaded.samples.size() == clip.samples.size());
  // int16 quantization round trip is exact on the quantized grid
  AudioClip again_path_clip = loaded;
  const std::string path2 = dir + "/clip2.wav";
  write_wav(path2, loaded);
  AudioClip reloaded = read_wav(path2);
  for (size_t i = 0; i < loaded.samples.size(); ++i) {
    CHECK(loaded.samples[i] == reloaded.samples[i]);
  }

  // wrong sample rate
  std::string buf = read_file(path);
  buf[24] = 0x40;  // 8000 Hz little-endian low byte (0x1f40)
  buf[25] = 0x1f;
  const std::string bad = dir + "/bad.wav";
  write_file(bad, buf);
  CHECK_THROWS_AS(read_wav(bad), WavFormatError);

  CHECK_THROWS_AS(read_wav(dir + "/missing.wav"), IoError);
}

TEST_CASE("stft/istft reconstructs the interior of a signal") {
  AudioClip clip = noise_clip(4096, 31, 0.4);
  Spectrogram spec = stft(clip.samples, 1024, 256, 1024);
  std::vector<float> rec = istft(spec, 1024, 256, 1024, clip.num_samples());
  REQUIRE(rec.size() == clip.samples.size());
  for (size_t i = 0; i < rec.size(); ++i) {
    CHECK(rec[i] == doctest::Approx(clip.samples[i]).epsilon(1e-4));
  }
}
