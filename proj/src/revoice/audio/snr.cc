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

#include "revoice/audio/snr.h"

#include <cmath>

#include "revoice/common/error.h"

namespace revoice {

double signal_energy(const AudioClip& clip) {
  double e = 0.0;
  for (float s : clip.samples) e += static_cast<double>(s) * s;
  return e;
}

double measure_snr(const AudioClip& signal, const AudioClip& noise) {
  if (signal.samples.size() != noise.samples.size()) {
    throw LengthMismatch("snr needs equal-length clips");
  }
  const double es = signal_energy(signal);
  const double en = signal_energy(noise);
  if (en == 0.0) throw ZeroNoise("snr undefined for all-zero noise");
  return 10.0 * std::log10(es / en);
}

double scale_noise_to_snr(const AudioClip& signal, const AudioClip& noise,
                          double target_snr_db) {
  if (signal.samples.size() != noise.samples.size()) {
    throw LengthMismatch("snr scaling needs equal-length clips");
  }
  const double es = signal_energy(signal);
  const double en = signal_energy(noise);
  if (es == 0.0) throw ZeroSignal("cannot set an SNR against a silent signal");
  if (en == 0.0) throw ZeroNoise("cannot scale all-zero noise");
  // es / (g^2 en) = 10^(snr/10)
  return std::sqrt(es / (en * std::pow(10.0, target_snr_db / 10.0)));
}

}  // namespace revoice
