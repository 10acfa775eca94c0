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

#ifndef REVOICE_COND_CODEBOOK_H_
#define REVOICE_COND_CODEBOOK_H_

#include <string>
#include <vector>

#include "revoice/audio/mel.h"
#include "revoice/cond/features.h"
#include "revoice/nn/tensor.h"

namespace revoice {
namespace cond {

/// Discrete per-frame unit ids at the mel frame rate.
struct ContentUnits {
  std::vector<int> ids;
  int hop_length = 256;
};

struct Codebook {
  int k = 0;
  int dim = 0;
  std::string feature_kind;
  nn::Tensor centroids;  // [k, dim]

  void save(const std::string& path) const;
  static Codebook load(const std::string& path);
};

// Seeded k-means (k-means++ init, Lloyd iterations capped at 100, empty
// clusters reseeded from the farthest point). Returned centroids are sorted
// by first coordinate so the fit is order-deterministic.
Codebook fit_codebook(const std::vector<nn::Tensor>& corpus_features, int k,
                      uint64_t seed);

// Nearest-centroid assignment (Euclidean, ties to the lowest index).
std::vector<int> assign_units(const nn::Tensor& features, const Codebook& cb);
ContentUnits extract_units(const AudioClip& audio, const Codebook& cb,
                           const MelConfig& mel_cfg);
ContentUnits extract_units_from_mel(const MelSpectrogram& mel, const Codebook& cb);

// External unit sequences: JSONL rows {utterance_id, ids: [...]}.
struct ExternalUnits {
  std::string utterance_id;
  std::vector<int> ids;
};
std::vector<ExternalUnits> load_external_units(const std::string& jsonl_path);

}  // namespace cond
}  // namespace revoice

#endif  // REVOICE_COND_CODEBOOK_H_
