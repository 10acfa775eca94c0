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

#include "revoice/audio/mel.h"

#include <algorithm>
#include <cmath>

#include "revoice/audio/stft.h"
#include "revoice/common/error.h"
#include "revoice/common/rng.h"

namespace revoice {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

void validate_mel_config(const MelConfig& cfg) {
  if (!(cfg.hop_length <= cfg.win_length && cfg.win_length <= cfg.n_fft)) {
    throw ShapeMismatch("mel config needs hop <= win <= n_fft");
  }
  if (cfg.n_mels < 1) throw ShapeMismatch("n_mels must be >= 1");
  if (cfg.log_floor <= 0.0) throw ShapeMismatch("log_floor must be > 0");
  if (cfg.fmax > cfg.sample_rate / 2.0 || cfg.fmin < 0.0 || cfg.fmin >= cfg.fmax) {
    throw ShapeMismatch("bad mel frequency range");
  }
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_to_hz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

MelFilterbank::MelFilterbank(const MelConfig& cfg)
    : n_mels_(cfg.n_mels), bins_(cfg.n_fft / 2 + 1) {
  validate_mel_config(cfg);
  const double mel_lo = hz_to_mel(cfg.fmin);
  const double mel_hi = hz_to_mel(cfg.fmax);
  centers_hz_.resize(n_mels_ + 2);
  for (int i = 0; i < n_mels_ + 2; ++i) {
    centers_hz_[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * i / (n_mels_ + 1));
  }
  w_.assign(static_cast<size_t>(n_mels_) * bins_, 0.0);
  const double bin_hz = static_cast<double>(cfg.sample_rate) / cfg.n_fft;
  for (int m = 0; m < n_mels_; ++m) {
    const double f0 = centers_hz_[m];
    const double f1 = centers_hz_[m + 1];
    const double f2 = centers_hz_[m + 2];
    const double area_norm = 2.0 / (f2 - f0);
    for (int k = 0; k < bins_; ++k) {
      const double f = k * bin_hz;
      double v = 0.0;
      if (f > f0 && f < f1) {
        v = (f - f0) / (f1 - f0);
      } else if (f >= f1 && f < f2) {
        v = (f2 - f) / (f2 - f1);
      }
      w_[static_cast<size_t>(m) * bins_ + k] = v * area_norm;
    }
  }
}

void MelFilterbank::apply(const double* power, double* mel) const {
  for (int m = 0; m < n_mels_; ++m) {
    const double* row = &w_[static_cast<size_t>(m) * bins_];
    double acc = 0.0;
    for (int k = 0; k < bins_; ++k) acc += row[k] * power[k];
    mel[m] = acc;
  }
}

void MelFilterbank::apply_transposed(const double* mel, double* power) const {
  for (int k = 0; k < bins_; ++k) power[k] = 0.0;
  for (int m = 0; m < n_mels_; ++m) {
    const double* row = &w_[static_cast<size_t>(m) * bins_];
    for (int k = 0; k < bins_; ++k) power[k] += row[k] * mel[m];
  }
  for (int k = 0; k < bins_; ++k) power[k] = std::max(power[k], 0.0);
}

MelSpectrogram mel_spectrogram(const AudioClip& audio, const MelConfig& cfg) {
  validate_audio(audio);
  validate_mel_config(cfg);
  if (audio.sample_rate != cfg.sample_rate) {
    throw SampleRateMismatch("audio sample rate does not match mel config");
  }

  Spectrogram spec = stft(audio.samples, cfg.win_length, cfg.hop_length, cfg.n_fft);
  MelFilterbank fb(cfg);

  MelSpectrogram mel;
  mel.frames = spec.frames;
  mel.n_mels = cfg.n_mels;
  mel.config = cfg;
  mel.values.resize(static_cast<size_t>(spec.frames) * cfg.n_mels);

  std::vector<double> power(spec.bins);
  std::vector<double> mel_row(cfg.n_mels);
  for (int f = 0; f < spec.frames; ++f) {
    for (int b = 0; b < spec.bins; ++b) power[b] = std::norm(spec.at(f, b));
    fb.apply(power.data(), mel_row.data());
    for (int m = 0; m < cfg.n_mels; ++m) {
      mel.at(f, m) = static_cast<float>(std::log(std::max(mel_row[m], cfg.log_floor)));
    }
  }
  return mel;
}

AudioClip griffin_lim(const MelSpectrogram& mel, int iterations, uint64_t seed) {
  if (iterations < 1) throw ParamOutOfRange("griffin_lim needs iterations >= 1");
  if (mel.frames < 1 || mel.n_mels != mel.config.n_mels) {
    throw ShapeMismatch("malformed mel spectrogram");
  }
  const MelConfig& cfg = mel.config;
  const int bins = cfg.n_fft / 2 + 1;
  MelFilterbank fb(cfg);

  // log-mel -> linear magnitude via the transposed filterbank
  std::vector<double> mag(static_cast<size_t>(mel.frames) * bins);
  {
    std::vector<double> mel_row(cfg.n_mels);
    std::vector<double> power(bins);
    for (int f = 0; f < mel.frames; ++f) {
      for (int m = 0; m < cfg.n_mels; ++m) mel_row[m] = std::exp(static_cast<double>(mel.at(f, m)));
      fb.apply_transposed(mel_row.data(), power.data());
      for (int b = 0; b < bins; ++b) mag[static_cast<size_t>(f) * bins + b] = std::sqrt(power[b]);
    }
  }

  const int64_t out_len = std::max<int64_t>(
      1, static_cast<int64_t>(mel.frames - 1) * cfg.hop_length);

  Rng rng(seed);
  Spectrogram spec;
  spec.frames = mel.frames;
  spec.bins = bins;
  spec.v.resize(static_cast<size_t>(mel.frames) * bins);
  for (int f = 0; f < mel.frames; ++f) {
    for (int b = 0; b < bins; ++b) {
      double phi = rng.uniform(0.0, 2.0 * kPi);
      spec.at(f, b) = std::polar(mag[static_cast<size_t>(f) * bins + b], phi);
    }
  }

  std::vector<float> x;
  for (int it = 0; it < iterations; ++it) {
    x = istft(spec, cfg.win_length, cfg.hop_length, cfg.n_fft, out_len);
    Spectrogram re = stft(x, cfg.win_length, cfg.hop_length, cfg.n_fft);
    for (int f = 0; f < mel.frames; ++f) {
      for (int b = 0; b < bins; ++b) {
        std::complex<double> c = re.at(f, b);
        double a = std::abs(c);
        double m = mag[static_cast<size_t>(f) * bins + b];
        spec.at(f, b) = (a > 1e-300) ? c * (m / a) : std::complex<double>(m, 0.0);
      }
    }
  }
  x = istft(spec, cfg.win_length, cfg.hop_length, cfg.n_fft, out_len);

  AudioClip out;
  out.sample_rate = cfg.sample_rate;
  out.samples = std::move(x);
  return out;
}

}  // namespace revoice
