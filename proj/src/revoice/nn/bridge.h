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

#ifndef REVOICE_NN_BRIDGE_H_
#define REVOICE_NN_BRIDGE_H_

#include "revoice/audio/mel.h"
#include "revoice/nn/tensor.h"

namespace revoice {
namespace nn {

inline Tensor mel_to_tensor(const MelSpectrogram& mel) {
  Tensor t({mel.frames, mel.n_mels});
  for (int64_t i = 0; i < t.numel(); ++i) t.flat(i) = mel.values[static_cast<size_t>(i)];
  return t;
}

inline MelSpectrogram tensor_to_mel(const Tensor& t, const MelConfig& cfg) {
  if (t.ndim() != 2) throw ShapeMismatch("mel tensor must be 2-d");
  MelSpectrogram mel;
  mel.frames = t.dim(0);
  mel.n_mels = t.dim(1);
  mel.config = cfg;
  mel.values.resize(static_cast<size_t>(t.numel()));
  for (int64_t i = 0; i < t.numel(); ++i) mel.values[static_cast<size_t>(i)] = t.flat(i);
  return mel;
}

}  // namespace nn
}  // namespace revoice

#endif  // REVOICE_NN_BRIDGE_H_
