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

#ifndef REVOICE_DIFFUSION_LOSSES_H_
#define REVOICE_DIFFUSION_LOSSES_H_

#include <optional>
#include <vector>

#include "revoice/common/rng.h"
#include "revoice/diffusion/schedule.h"
#include "revoice/diffusion/score_net.h"
#include "revoice/nn/tensor.h"

namespace revoice {
namespace diffusion {

constexpr double kTrainTimeMin = 1e-4;

struct VcLossConfig {
  double alpha = 0.5;           // weight on the encoder loss
  double t_min = kTrainTimeMin;
  double cfg_dropout = 0.1;     // independent per condition

  nlohmann::json to_json() const {
    return {{"alpha", alpha}, {"t_min", t_min}, {"cfg_dropout", cfg_dropout}};
  }
  static VcLossConfig from_json(const nlohmann::json& j) {
    VcLossConfig c;
    c.alpha = j.value("alpha", 0.5);
    c.t_min = j.value("t_min", kTrainTimeMin);
    c.cfg_dropout = j.value("cfg_dropout", 0.1);
    if (c.alpha < 0.0) throw ConfigError("alpha must be >= 0");
    return c;
  }
};

/// M_t = M_hat + a(t) * (M_0 - M_hat) + sigma(t) * noise.
nn::Tensor forward_sample(const nn::Tensor& m0, const nn::Tensor& m_hat, double t,
                          const nn::Tensor& noise, const DiffusionSchedule& sched);

struct ScoreLossItem {
  nn::Tensor m0;
  nn::Tensor m_hat;
  nn::Tensor spk;  // [1, spk_dim]
};

// Batch expectation of ||s_theta(M_t, t | M_hat, s) + eps_t||^2 with t ~
// U[t_min, 1], eps ~ N(0, I) and independent condition dropout. Tests may pin
// (t, eps) through the forced_* hooks.
double score_loss(const ScorePredictor& net, const std::vector<ScoreLossItem>& batch,
                  const DiffusionSchedule& sched, const VcLossConfig& cfg, Rng& rng,
                  const nn::Tensor* forced_noise = nullptr,
                  const double* forced_t = nullptr);

/// Eq.-style total: l_d + alpha * l_enc.
double total_loss(double l_d, double l_enc, const VcLossConfig& cfg);

}  // namespace diffusion
}  // namespace revoice

#endif  // REVOICE_DIFFUSION_LOSSES_H_
