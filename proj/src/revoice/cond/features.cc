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

#include "revoice/cond/features.h"

#include <cmath>

namespace revoice {
namespace cond {

nn::Tensor cepstral_features(const MelSpectrogram& mel) {
  const int n = mel.n_mels;
  nn::Tensor out({mel.frames, kCepstraDim});
  const double pi = 3.14159265358979323846;
  const double scale0 = std::sqrt(1.0 / n);
  const double scale = std::sqrt(2.0 / n);
  for (int f = 0; f < mel.frames; ++f) {
    for (int j = 0; j < kCepstraDim; ++j) {
      double acc = 0.0;
      for (int m = 0; m < n; ++m) {
        acc += mel.at(f, m) * std::cos(pi * j * (m + 0.5) / n);
      }
      out.at2(f, j) = static_cast<float>(acc * (j == 0 ? scale0 : scale));
    }
  }
  return out;
}

}  // namespace cond
}  // namespace revoice
