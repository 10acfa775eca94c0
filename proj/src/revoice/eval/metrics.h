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

#ifndef REVOICE_EVAL_METRICS_H_
#define REVOICE_EVAL_METRICS_H_

#include "revoice/audio/audio.h"
#include "revoice/audio/mel.h"

namespace revoice {
namespace eval {

// Log-spectral distance in dB over magnitude STFTs (window settings from the
// mel config). A length mismatch trims/pads est with a warning on stderr.
double lsd(const AudioClip& ref, const AudioClip& est,
           const MelConfig& cfg = MelConfig());

// Scale-invariant SDR in dB; returns +inf when est is an exact scaled copy.
double si_sdr(const AudioClip& ref, const AudioClip& est);

double mel_l1(const MelSpectrogram& a, const MelSpectrogram& b);

}  // namespace eval
}  // namespace revoice

#endif  // REVOICE_EVAL_METRICS_H_
