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

#include "revoice/cond/codebook.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "revoice/common/error.h"
#include "revoice/common/io.h"
#include "revoice/common/rng.h"
#include "revoice/nn/checkpoint.h"

namespace revoice {
namespace cond {

namespace {
double sq_dist(const float* a, const float* b, int dim) {
  double acc = 0.0;
  for (int i = 0; i < dim; ++i) {
    const double d = static_cast<double>(a[i]) - b[i];
    acc += d * d;
  }
  return acc;
}
}  // namespace

void Codebook::save(const std::string& path) const {
  nlohmann::json config = {{"k", k}, {"dim", dim}, {"feature_kind", feature_kind}};
  nn::save_checkpoint(path, config, {{"centroids", &centroids}});
}

Codebook Codebook::load(const std::string& path) {
  nn::Checkpoint ckpt = nn::load_checkpoint(path);
  Codebook cb;
  cb.k = ckpt.config.at("k").get<int>();
  cb.dim = ckpt.config.at("dim").get<int>();
  cb.feature_kind = ckpt.config.at("feature_kind").get<std::string>();
  cb.centroids = ckpt.tensors.at("centroids");
  if (cb.centroids.ndim() != 2 || cb.centroids.dim(0) != cb.k ||
      cb.centroids.dim(1) != cb.dim) {
    throw CorruptCheckpoint("codebook centroid shape mismatch");
  }
  return cb;
}

Codebook fit_codebook(const std::vector<nn::Tensor>& corpus_features, int k,
                      uint64_t seed) {
  if (k < 1) throw ParamOutOfRange("fit_codebook: k must be >= 1");
  int dim = -1;
  int64_t total = 0;
  for (const nn::Tensor& t : corpus_features) {
    if (t.ndim() != 2) throw ShapeMismatch("fit_codebook: features must be 2-d");
    if (dim < 0) dim = t.dim(1);
    if (t.dim(1) != dim) throw ShapeMismatch("fit_codebook: feature dim mismatch");
    total += t.dim(0);
  }
  if (total < k) {
    throw TooFewFrames("fit_codebook: " + std::to_string(total) + " frames < k=" +
                       std::to_string(k));
  }

  // flatten corpus
  nn::Tensor frames({static_cast<int>(total), dim});
  {
    int64_t row = 0;
    for (const nn::Tensor& t : corpus_features) {
      for (int f = 0; f < t.dim(0); ++f, ++row) {
        for (int d = 0; d < dim; ++d) frames.at2(static_cast<int>(row), d) = t.at2(f, d);
      }
    }
  }
  const int n = static_cast<int>(total);

  Rng rng(seed);
  nn::Tensor centroids({k, dim});
  // k-means++ seeding
  std::vector<double> min_d2(static_cast<size_t>(n), 0.0);
  {
    const int first = static_cast<int>(rng.uniform_int(0, n - 1));
    for (int d = 0; d < dim; ++d) centroids.at2(0, d) = frames.at2(first, d);
    for (int i = 0; i < n; ++i) {
      min_d2[static_cast<size_t>(i)] =
          sq_dist(&frames.at2(i, 0), &centroids.at2(0, 0), dim);
    }
    for (int c = 1; c < k; ++c) {
      double sum = 0.0;
      for (double v : min_d2) sum += v;
      int chosen = n - 1;
      if (sum > 0.0) {
        const double r = rng.uniform() * sum;
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
          acc += min_d2[static_cast<size_t>(i)];
          if (acc >= r) {
            chosen = i;
            break;
          }
        }
      } else {
        chosen = static_cast<int>(rng.uniform_int(0, n - 1));
      }
      for (int d = 0; d < dim; ++d) centroids.at2(c, d) = frames.at2(chosen, d);
      for (int i = 0; i < n; ++i) {
        const double d2 = sq_dist(&frames.at2(i, 0), &centroids.at2(c, 0), dim);
        min_d2[static_cast<size_t>(i)] = std::min(min_d2[static_cast<size_t>(i)], d2);
      }
    }
  }

  // Lloyd iterations
  std::vector<int> assign(static_cast<size_t>(n), -1);
  std::vector<double> sums(static_cast<size_t>(k) * dim);
  std::vector<int> counts(static_cast<size_t>(k));
  for (int iter = 0; iter < 100; ++iter) {
    int changed = 0;
    for (int i = 0; i < n; ++i) {
      double best = 1e300;
      int best_c = 0;
      for (int c = 0; c < k; ++c) {
        const double d2 = sq_dist(&frames.at2(i, 0), &centroids.at2(c, 0), dim);
        if (d2 < best) {
          best = d2;
          best_c = c;
        }
      }
      if (assign[static_cast<size_t>(i)] != best_c) {
        assign[static_cast<size_t>(i)] = best_c;
        ++changed;
      }
    }
    if (changed == 0 && iter > 0) break;
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (int i = 0; i < n; ++i) {
      const int c = assign[static_cast<size_t>(i)];
      ++counts[static_cast<size_t>(c)];
      for (int d = 0; d < dim; ++d) {
        sums[static_cast<size_t>(c) * dim + d] += frames.at2(i, d);
      }
    }
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<size_t>(c)] == 0) {
        // reseed from the point farthest from its centroid
        double worst = -1.0;
        int worst_i = 0;
        for (int i = 0; i < n; ++i) {
          const double d2 = sq_dist(&frames.at2(i, 0),
                                    &centroids.at2(assign[static_cast<size_t>(i)], 0), dim);
          if (d2 > worst) {
            worst = d2;
            worst_i = i;
          }
        }
        for (int d = 0; d < dim; ++d) centroids.at2(c, d) = frames.at2(worst_i, d);
      } else {
        for (int d = 0; d < dim; ++d) {
          centroids.at2(c, d) = static_cast<float>(
              sums[static_cast<size_t>(c) * dim + d] / counts[static_cast<size_t>(c)]);
        }
      }
    }
  }

  // deterministic ordering
  std::vector<int> order(static_cast<size_t>(k));
  for (int c = 0; c < k; ++c) order[static_cast<size_t>(c)] = c;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return centroids.at2(a, 0) < centroids.at2(b, 0);
  });
  Codebook cb;
  cb.k = k;
  cb.dim = dim;
  cb.feature_kind = kCepstraKind;
  cb.centroids = nn::Tensor({k, dim});
  for (int c = 0; c < k; ++c) {
    for (int d = 0; d < dim; ++d) {
      cb.centroids.at2(c, d) = centroids.at2(order[static_cast<size_t>(c)], d);
    }
  }
  return cb;
}

std::vector<int> assign_units(const nn::Tensor& features, const Codebook& cb) {
  if (features.ndim() != 2 || features.dim(1) != cb.dim) {
    throw FeatureKindMismatch("feature dim " + std::to_string(features.dim(1)) +
                              " does not match codebook dim " + std::to_string(cb.dim));
  }
  std::vector<int> ids(static_cast<size_t>(features.dim(0)));
  for (int f = 0; f < features.dim(0); ++f) {
    double best = 1e300;
    int best_c = 0;
    const float* frow = features.data() + static_cast<size_t>(f) * cb.dim;
    for (int c = 0; c < cb.k; ++c) {
      const double d2 =
          sq_dist(frow, cb.centroids.data() + static_cast<size_t>(c) * cb.dim, cb.dim);
      if (d2 < best) {  // strict < keeps the lowest index on ties
        best = d2;
        best_c = c;
      }
    }
    ids[static_cast<size_t>(f)] = best_c;
  }
  return ids;
}

ContentUnits extract_units_from_mel(const MelSpectrogram& mel, const Codebook& cb) {
  if (cb.feature_kind != kCepstraKind) {
    throw FeatureKindMismatch("codebook was fitted on '" + cb.feature_kind +
                              "', extractor provides '" + kCepstraKind + "'");
  }
  ContentUnits units;
  units.hop_length = mel.config.hop_length;
  units.ids = assign_units(cepstral_features(mel), cb);
  return units;
}

ContentUnits extract_units(const AudioClip& audio, const Codebook& cb,
                           const MelConfig& mel_cfg) {
  return extract_units_from_mel(mel_spectrogram(audio, mel_cfg), cb);
}

std::vector<ExternalUnits> load_external_units(const std::string& jsonl_path) {
  const std::string raw = read_file(jsonl_path);
  std::vector<ExternalUnits> out;
  std::istringstream ss(raw);
  std::string line;
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line);
    ExternalUnits u;
    u.utterance_id = j.at("utterance_id").get<std::string>();
    u.ids = j.at("ids").get<std::vector<int>>();
    out.push_back(std::move(u));
  }
  return out;
}

}  // namespace cond
}  // namespace revoice
