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

#include "revoice/diffusion/losses.h"

#include <cmath>

#include "revoice/common/error.h"

namespace revoice {
namespace diffusion {

nn::Tensor forward_sample(const nn::Tensor& m0, const nn::Tensor& m_hat, double t,
                          const nn::Tensor& noise, const DiffusionSchedule& sched) {
  if (t < 0.0 || t > 1.0) {
    throw TimeOutOfRange("diffusion time " + std::to_string(t) + " outside [0, 1]");
  }
  if (!m0.same_shape(m_hat) || !m0.same_shape(noise)) {
    throw ShapeMismatch("forward_sample shape mismatch");
  }
  const double a = sched.mean_coef(t);
  const double s = sched.sigma(t);
  nn::Tensor out(m0.shape());
  for (int64_t i = 0; i < out.numel(); ++i) {
    out.flat(i) = static_cast<float>(m_hat.flat(i) +
                                     a * (static_cast<double>(m0.flat(i)) - m_hat.flat(i)) +
                                     s * noise.flat(i));
  }
  return out;
}

double score_loss(const ScorePredictor& net, const std::vector<ScoreLossItem>& batch,
                  const DiffusionSchedule& sched, const VcLossConfig& cfg, Rng& rng,
                  const nn::Tensor* forced_noise, const double* forced_t) {
  if (batch.empty()) throw EmptyManifest("score_loss: empty batch");
  double loss_acc = 0.0;
  for (const ScoreLossItem& item : batch) {
    const double t = (forced_t != nullptr) ? *forced_t
                                           : rng.uniform(cfg.t_min, 1.0);
    nn::Tensor noise(item.m0.shape());
    if (forced_noise != nullptr) {
      if (!forced_noise->same_shape(item.m0)) {
        throw ShapeMismatch("forced noise shape mismatch");
      }
      noise = *forced_noise;
    } else {
      for (int64_t i = 0; i < noise.numel(); ++i) {
        noise.flat(i) = static_cast<float>(rng.normal());
      }
    }
    const bool drop_content = rng.uniform() < cfg.cfg_dropout;
    const bool drop_spk = rng.uniform() < cfg.cfg_dropout;

    nn::Tensor m_t = forward_sample(item.m0, item.m_hat, t, noise, sched);
    nn::Tensor pred = net(m_t, t, drop_content ? nullptr : &item.m_hat,
                          drop_spk ? nullptr : &item.spk);
    if (!pred.same_shape(item.m0)) {
      throw ShapeMismatch("score prediction shape mismatch");
    }
    double acc = 0.0;
    for (int64_t i = 0; i < pred.numel(); ++i) {
      const double d = static_cast<double>(pred.flat(i)) + noise.flat(i);
      acc += d * d;
    }
    loss_acc += acc;
  }
  const double loss = loss_acc / static_cast<double>(batch.size());
  if (!std::isfinite(loss)) throw NonFiniteLoss("score_loss is not finite");
  return loss;
}

double total_loss(double l_d, double l_enc, const VcLossConfig& cfg) {
  if (!std::isfinite(l_d) || !std::isfinite(l_enc)) {
    throw NonFiniteLoss("total_loss components must be finite");
  }
  return l_d + cfg.alpha * l_enc;
}

}  // namespace diffusion
}  // namespace revoice
