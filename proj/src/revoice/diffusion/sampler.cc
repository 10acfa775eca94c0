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

#include "revoice/diffusion/sampler.h"

#include <cmath>

#include "revoice/common/error.h"
#include "revoice/common/rng.h"
#include "revoice/nn/checkpoint.h"

namespace revoice {
namespace diffusion {

namespace {
nn::Tensor negated(const nn::Tensor& t) {
  nn::Tensor out(t.shape());
  for (int64_t i = 0; i < t.numel(); ++i) out.flat(i) = -t.flat(i);
  return out;
}
}  // namespace

nn::Tensor guided_score(const ScorePredictor& net, const nn::Tensor& m_t, double t,
                        const nn::Tensor& m_hat, const nn::Tensor& spk,
                        const GuidanceConfig& g) {
  const double lc = g.content_scale;
  const double ls = g.speaker_scale;
  // exact corners; evaluating only the needed branch is numerically identical
  if (lc == 1.0 && ls == 1.0) return negated(net(m_t, t, &m_hat, &spk));
  if (lc == 1.0 && ls == 0.0) return negated(net(m_t, t, &m_hat, nullptr));
  if (lc == 0.0 && ls == 0.0) return negated(net(m_t, t, nullptr, nullptr));

  nn::Tensor e_cs = negated(net(m_t, t, &m_hat, &spk));
  nn::Tensor e_c = negated(net(m_t, t, &m_hat, nullptr));
  nn::Tensor e_uu = negated(net(m_t, t, nullptr, nullptr));
  nn::Tensor out(m_t.shape());
  for (int64_t i = 0; i < out.numel(); ++i) {
    // left-to-right: base, content branch, speaker branch
    double v = e_uu.flat(i);
    v += lc * (static_cast<double>(e_c.flat(i)) - e_uu.flat(i));
    v += ls * (static_cast<double>(e_cs.flat(i)) - e_c.flat(i));
    out.flat(i) = static_cast<float>(v);
  }
  return out;
}

void SamplerTrace::save(const std::string& path) const {
  std::vector<std::pair<std::string, const nn::Tensor*>> tensors;
  tensors.reserve(states.size());
  for (size_t i = 0; i < states.size(); ++i) {
    tensors.emplace_back("step" + std::to_string(i), &states[i]);
  }
  nn::save_checkpoint(path, {{"kind", "sampler_trace"}, {"steps", states.size()}},
                      tensors);
}

nn::Tensor reverse_sample(const ScorePredictor& net, const nn::Tensor& m_hat,
                          const nn::Tensor& spk, const GuidanceConfig& g,
                          const DiffusionSchedule& sched, uint64_t seed,
                          SamplerTrace* trace) {
  if (g.n_steps < 1) throw ParamOutOfRange("reverse_sample needs n_steps >= 1");
  Rng rng(seed);
  nn::Tensor m(m_hat.shape());
  for (int64_t i = 0; i < m.numel(); ++i) {
    m.flat(i) = static_cast<float>(m_hat.flat(i) + rng.normal());
  }
  if (trace != nullptr) trace->states.push_back(m);

  const double h = 1.0 / g.n_steps;
  for (int step = 0; step < g.n_steps; ++step) {
    const double t = 1.0 - step * h;
    const double beta_t = sched.beta(t);
    const double sigma_t = sched.sigma(t);
    nn::Tensor eps_hat = guided_score(net, m, t, m_hat, spk, g);
    const bool last = (step == g.n_steps - 1);
    for (int64_t i = 0; i < m.numel(); ++i) {
      const double score = -static_cast<double>(eps_hat.flat(i)) / sigma_t;
      double v = m.flat(i) +
                 beta_t * h * (0.5 * (static_cast<double>(m.flat(i)) - m_hat.flat(i)) +
                               score);
      if (!last) v += std::sqrt(beta_t * h) * rng.normal();
      if (!std::isfinite(v)) {
        throw NonFiniteState("reverse_sample diverged at step " + std::to_string(step));
      }
      m.flat(i) = static_cast<float>(v);
    }
    if (trace != nullptr) trace->states.push_back(m);
  }
  return m;
}

}  // namespace diffusion
}  // namespace revoice
