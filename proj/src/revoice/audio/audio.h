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

#ifndef REVOICE_AUDIO_AUDIO_H_
#define REVOICE_AUDIO_AUDIO_H_

#include <cstdint>
#include <vector>

namespace revoice {

constexpr int kSampleRate = 16000;

/// Mono waveform. Samples are nominally in [-1, 1]; fixed 16 kHz rate.
struct AudioClip {
  std::vector<float> samples;
  int sample_rate = kSampleRate;

  int64_t num_samples() const { return static_cast<int64_t>(samples.size()); }
  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

/// Throws EmptyAudio / SampleRateMismatch / NonFiniteAudio on invariant breaks.
void validate_audio(const AudioClip& clip);

}  // namespace revoice

#endif  // REVOICE_AUDIO_AUDIO_H_
