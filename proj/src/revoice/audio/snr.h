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

#ifndef REVOICE_AUDIO_SNR_H_
#define REVOICE_AUDIO_SNR_H_

#include "revoice/audio/audio.h"

namespace revoice {

double signal_energy(const AudioClip& clip);

/// 10*log10(sum s^2 / sum n^2); throws LengthMismatch / ZeroNoise.
double measure_snr(const AudioClip& signal, const AudioClip& noise);

/// Gain g so that measure_snr(signal, g*noise) == target_snr_db.
double scale_noise_to_snr(const AudioClip& signal, const AudioClip& noise,
                          double target_snr_db);

}  // namespace revoice

#endif  // REVOICE_AUDIO_SNR_H_
