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

#ifndef REVOICE_DEGRADE_DEGRADE_H_
#define REVOICE_DEGRADE_DEGRADE_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "revoice/audio/audio.h"

namespace revoice {
namespace degrade {

constexpr double kMinSnrDb = -15.0;
constexpr double kMaxSnrDb = 40.0;
constexpr double kMaxDropMs = 100.0;

struct OpSpec {
  std::string kind;       // mix_noise | packet_drop | clip | band_limit | reverb | codec
  nlohmann::json params;  // op-specific, see to_json/from_json
};

/// Ordered, seeded chain of distortion operators.
struct DegradationSpec {
  std::vector<OpSpec> ops;
  uint64_t seed = 0;

  nlohmann::json to_json() const;
  static DegradationSpec from_json(const nlohmann::json& j);
};

/// Realized parameters; together with the clean input this reproduces the
/// exact transformation (see replay_chain).
struct DegradationReport {
  uint64_t seed = 0;
  std::vector<nlohmann::json> ops;

  nlohmann::json to_json() const;
  static DegradationReport from_json(const nlohmann::json& j);
};

AudioClip white_noise(size_t len, uint64_t seed);

// Tiles or truncates noise to len; tiling starts at a seeded offset.
AudioClip fit_noise_length(const AudioClip& noise, size_t len, uint64_t seed,
                           int64_t* offset_out = nullptr);

AudioClip mix_at_snr(const AudioClip& clean, const AudioClip& noise,
                     double snr_db, uint64_t seed = 0,
                     nlohmann::json* realized = nullptr);
AudioClip packet_drop(const AudioClip& audio, int n_drops, double max_len_ms,
                      uint64_t seed, nlohmann::json* realized = nullptr);
AudioClip clip_distort(const AudioClip& audio, double threshold,
                       nlohmann::json* realized = nullptr);
AudioClip band_limit(const AudioClip& audio, double cutoff_hz,
                     nlohmann::json* realized = nullptr);
AudioClip reverberate(const AudioClip& audio, double rt60_s, uint64_t seed,
                      nlohmann::json* realized = nullptr);
AudioClip codec_artifact(const AudioClip& audio, int bits,
                         nlohmann::json* realized = nullptr);

// Worst-case |out - in| for companding at the given depth, evaluated from the
// expander slope at full scale.
double codec_error_bound(int bits);

// Validates every op up front (errors carry the op index), then applies the
// ops in order. Pure function of (clean, spec).
std::pair<AudioClip, DegradationReport> apply_chain(const AudioClip& clean,
                                                    const DegradationSpec& spec);

// Re-applies the exact transformation recorded in a report.
AudioClip replay_chain(const AudioClip& clean, const DegradationReport& report);

}  // namespace degrade
}  // namespace revoice

#endif  // REVOICE_DEGRADE_DEGRADE_H_
