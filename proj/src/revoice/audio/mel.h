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

#ifndef REVOICE_AUDIO_MEL_H_
#define REVOICE_AUDIO_MEL_H_

#include <vector>

#include "revoice/audio/audio.h"

namespace revoice {

struct MelConfig {
  int sample_rate = 16000;
  int win_length = 1024;
  int hop_length = 256;
  int n_fft = 1024;
  int n_mels = 80;
  double fmin = 0.0;
  double fmax = 8000.0;
  double log_floor = 1e-5;  // linear-domain energy floor before the log

  bool operator==(const MelConfig&) const = default;
};

void validate_mel_config(const MelConfig& cfg);

/// frames x n_mels matrix of log-amplitudes: log(max(mel_energy, log_floor)).
struct MelSpectrogram {
  int frames = 0;
  int n_mels = 0;
  std::vector<float> values;  // row-major
  MelConfig config;

  float& at(int f, int m) { return values[static_cast<size_t>(f) * n_mels + m]; }
  float at(int f, int m) const { return values[static_cast<size_t>(f) * n_mels + m]; }
  bool same_shape(const MelSpectrogram& o) const {
    return frames == o.frames && n_mels == o.n_mels;
  }
};

// HTK mel scale: 2595 * log10(1 + f/700).
double hz_to_mel(double hz);
double mel_to_hz(double mel);

// Triangular, area-normalized filters on the HTK mel scale.
class MelFilterbank {
 public:
  explicit MelFilterbank(const MelConfig& cfg);
  int n_mels() const { return n_mels_; }
  int bins() const { return bins_; }
  double center_hz(int m) const { return centers_hz_[m + 1]; }
  double weight(int m, int k) const { return w_[static_cast<size_t>(m) * bins_ + k]; }

  // mel[m] = sum_k w[m,k] * power[k]
  void apply(const double* power, double* mel) const;
  // power[k] = max(0, sum_m w[m,k] * mel[m]); the crude pseudo-inverse
  void apply_transposed(const double* mel, double* power) const;

 private:
  int n_mels_;
  int bins_;
  std::vector<double> centers_hz_;  // n_mels + 2 band edges
  std::vector<double> w_;           // dense [n_mels, bins]
};

/// Forward analysis; frame count is 1 + floor(T / hop).
MelSpectrogram mel_spectrogram(const AudioClip& audio, const MelConfig& cfg);

/// Deterministic mel inversion: transposed-filterbank magnitude estimate plus
/// Griffin-Lim phase recovery from a seeded random start.
AudioClip griffin_lim(const MelSpectrogram& mel, int iterations, uint64_t seed);

}  // namespace revoice

#endif  // REVOICE_AUDIO_MEL_H_
