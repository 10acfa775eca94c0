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

#ifndef REVOICE_AUDIO_WAV_H_
#define REVOICE_AUDIO_WAV_H_

#include <string>

#include "revoice/audio/audio.h"

namespace revoice {

// PCM signed 16-bit, mono, 16 kHz, little-endian. Anything else is rejected
// with WavFormatError.
AudioClip read_wav(const std::string& path);
void write_wav(const std::string& path, const AudioClip& clip);

}  // namespace revoice

#endif  // REVOICE_AUDIO_WAV_H_
