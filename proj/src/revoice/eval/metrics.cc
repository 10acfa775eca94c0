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

#include "revoice/eval/metrics.h"

#include <cmath>
#include <iostream>
#include <limits>

#include "revoice/audio/stft.h"
#include "revoice/common/error.h"

namespace revoice {
namespace eval {

namespace {
constexpr double kLsdDelta = 1e-8;
}

double lsd(const AudioClip& ref, const AudioClip& est, const MelConfig& cfg) {
  validate_audio(ref);
  validate_audio(est);
  AudioClip aligned = est;
  if (est.samples.size() != ref.samples.size()) {
    std::cerr << "[revoice] lsd: length mismatch (" << est.samples.size() << " vs "
              << ref.samples.size() << "), trimming/padding estimate\n";
    aligned.samples.resize(ref.samples.size(), 0.0f);
  }
  Spectrogram sr = stft(ref.samples, cfg.win_length, cfg.hop_length, cfg.n_fft);
  Spectrogram se = stft(aligned.samples, cfg.win_length, cfg.hop_length, cfg.n_fft);
  double frame_acc = 0.0;
  for (int f = 0; f < sr.frames; ++f) {
    double acc = 0.0;
    for (int b = 0; b < sr.bins; ++b) {
      const double lr = 20.0 * std::log10(std::abs(sr.at(f, b)) + kLsdDelta);
      const double le = 20.0 * std::log10(std::abs(se.at(f, b)) + kLsdDelta);
      const double d = lr - le;
      acc += d * d;
    }
    frame_acc += std::sqrt(acc / sr.bins);
  }
  return frame_acc / sr.frames;
}

double si_sdr(const AudioClip& ref, const AudioClip& est) {
  if (ref.samples.size() != est.samples.size()) {
    throw LengthMismatch("si_sdr needs equal-length clips");
  }
  double ref_energy = 0.0, dot = 0.0;
  for (size_t i = 0; i < ref.samples.size(); ++i) {
    ref_energy += static_cast<double>(ref.samples[i]) * ref.samples[i];
    dot += static_cast<double>(ref.samples[i]) * est.samples[i];
  }
  if (ref_energy == 0.0) throw ZeroReference("si_sdr reference is silent");
  const double alpha = dot / ref_energy;
  double target_energy = 0.0, residual_energy = 0.0;
  for (size_t i = 0; i < ref.samples.size(); ++i) {
    const double t = alpha * ref.samples[i];
    const double r = est.samples[i] - t;
    target_energy += t * t;
    residual_energy += r * r;
  }
  if (residual_energy == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(target_energy / residual_energy);
}

double mel_l1(const MelSpectrogram& a, const MelSpectrogram& b) {
  if (!a.same_shape(b)) throw ShapeMismatch("mel_l1 shape mismatch");
  double acc = 0.0;
  for (size_t i = 0; i < a.values.size(); ++i) {
    acc += std::abs(static_cast<double>(a.values[i]) - b.values[i]);
  }
  return acc / static_cast<double>(a.values.size());
}

}  // namespace eval
}  // namespace revoice
