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

#ifndef REVOICE_DIFFUSION_SAMPLER_H_
#define REVOICE_DIFFUSION_SAMPLER_H_

#include <string>
#include <vector>

#include "revoice/diffusion/losses.h"
#include "revoice/diffusion/schedule.h"
#include "revoice/diffusion/score_net.h"

namespace revoice {
namespace diffusion {

// Classifier-free-guided noise prediction (e = -s_theta):
//   e(0,0) + lambda_c * [e(M,0) - e(0,0)] + lambda_s * [e(M,s) - e(M,0)]
// evaluated left-to-right. The lambda corners pinned by the guidance algebra
// ((1,1), (1,0), (0,0)) return the corresponding branch directly so the
// telescoping identities hold bit-exactly; unused branches are then skipped.
// The sampler turns the result into a score as -e / sigma(t).
nn::Tensor guided_score(const ScorePredictor& net, const nn::Tensor& m_t, double t,
                        const nn::Tensor& m_hat, const nn::Tensor& spk,
                        const GuidanceConfig& g);

// Optional per-step state dump of the reverse trajectory.
struct SamplerTrace {
  std::vector<nn::Tensor> states;  // M_t after every step, prior sample first
  void save(const std::string& path) const;  // tensor container
};

// Euler-Maruyama reversal of the VP SDE from M_1 ~ N(M_hat, I); n_steps
// uniform steps, drift evaluated at the current (state, time), final step
// noiseless. Pure function of (net, inputs, seed).
nn::Tensor reverse_sample(const ScorePredictor& net, const nn::Tensor& m_hat,
                          const nn::Tensor& spk, const GuidanceConfig& g,
                          const DiffusionSchedule& sched, uint64_t seed,
                          SamplerTrace* trace = nullptr);

}  // namespace diffusion
}  // namespace revoice

#endif  // REVOICE_DIFFUSION_SAMPLER_H_
