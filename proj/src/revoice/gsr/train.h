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

#ifndef REVOICE_GSR_TRAIN_H_
#define REVOICE_GSR_TRAIN_H_

#include <string>

#include "revoice/eval/manifest.h"
#include "revoice/gsr/loss.h"
#include "revoice/gsr/resunet.h"
#include "revoice/nn/optim.h"

namespace revoice {
namespace gsr {

struct GsrTrainOptions {
  GsrConfig model;
  GsrLossConfig loss;
  nn::OptimizerConfig optimizer;  // defaults: adamw, lr 2e-4, gamma 0.999, batch 32
  MelConfig mel;
  int crop_frames = 64;
  uint64_t seed = 1;
  std::string log_csv_path;     // per-epoch CSV when non-empty
  std::string checkpoint_path;  // written at end when non-empty

  GsrTrainOptions() {
    optimizer.kind = "adamw";
    optimizer.learning_rate = 2e-4;
    optimizer.decay_gamma = 0.999;
    optimizer.batch_size = 32;
    optimizer.epochs = 100;
  }
};

// Supervised restoration training over (degraded, clean) pairs. Emits a
// per-epoch loss log and aborts on a non-finite loss.
GsrModel train_gsr(const eval::Manifest& manifest, const GsrTrainOptions& opts);

}  // namespace gsr
}  // namespace revoice

#endif  // REVOICE_GSR_TRAIN_H_
