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

#ifndef REVOICE_TESTS_TESTUTIL_TOY_SPEECH_H_
#define REVOICE_TESTS_TESTUTIL_TOY_SPEECH_H_

#include <string>
#include <vector>

#include "revoice/audio/audio.h"
#include "revoice/degrade/degrade.h"
#include "revoice/eval/manifest.h"

namespace revoice {
namespace testutil {

constexpr int kToySpeakers = 4;

// Formant-synthesized speech-like utterance: per-speaker f0 and formant
// scale, syllable trains of resonated pulse excitation with occasional
// fricative-like noise bursts.
AudioClip toy_utterance(int speaker, double duration_s, uint64_t seed);

// Unique scratch directory under the build tree.
std::string fresh_dir(const std::string& tag);

struct ToyCorpusOptions {
  int utterances_per_speaker = 4;
  int enrollment_per_speaker = 2;
  double duration_s = 0.8;
  uint64_t seed = 1234;
};

// Writes clean WAVs plus per-speaker enrollment clips; rows carry speaker ids
// and enrollment paths.
eval::Manifest make_toy_corpus(const std::string& dir, const ToyCorpusOptions& opts);

// Applies the degradation chain per row (seeded per utterance) and fills
// degraded_path.
eval::Manifest degrade_corpus(const eval::Manifest& clean, const std::string& dir,
                              const std::vector<degrade::OpSpec>& ops, uint64_t seed);

}  // namespace testutil
}  // namespace revoice

#endif  // REVOICE_TESTS_TESTUTIL_TOY_SPEECH_H_
