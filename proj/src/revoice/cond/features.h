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

#ifndef REVOICE_COND_FEATURES_H_
#define REVOICE_COND_FEATURES_H_

#include <string>

#include "revoice/audio/mel.h"
#include "revoice/nn/tensor.h"

namespace revoice {
namespace cond {

constexpr int kCepstraDim = 13;
inline const char* kCepstraKind = "cepstra13-v1";

// Per-frame content features: orthonormal DCT-II of each log-mel row, first
// 13 coefficients. Cheap, speaker-attenuating stand-in for SSL features.
nn::Tensor cepstral_features(const MelSpectrogram& mel);

}  // namespace cond
}  // namespace revoice

#endif  // REVOICE_COND_FEATURES_H_
