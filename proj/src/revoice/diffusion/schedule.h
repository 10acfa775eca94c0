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

#ifndef REVOICE_DIFFUSION_SCHEDULE_H_
#define REVOICE_DIFFUSION_SCHEDULE_H_

#include <cmath>

#include "json.hpp"

namespace revoice {
namespace diffusion {

// Variance-preserving SDE with a linear beta ramp. With the defaults,
// a(1) ~ 0.0067 so the t=1 prior is effectively N(prior_mean, I).
struct DiffusionSchedule {
  double beta0 = 0.05;
  double beta1 = 20.0;

  double beta(double t) const { return beta0 + (beta1 - beta0) * t; }
  double integrated(double t) const {  // B(t)
    return beta0 * t + 0.5 * (beta1 - beta0) * t * t;
  }
  double mean_coef(double t) const { return std::exp(-0.5 * integrated(t)); }  // a(t)
  double sigma(double t) const { return std::sqrt(1.0 - std::exp(-integrated(t))); }

  nlohmann::json to_json() const { return {{"beta0", beta0}, {"beta1", beta1}}; }
  static DiffusionSchedule from_json(const nlohmann::json& j) {
    DiffusionSchedule s;
    s.beta0 = j.value("beta0", 0.05);
    s.beta1 = j.value("beta1", 20.0);
    return s;
  }
};

struct GuidanceConfig {
  double speaker_scale = 0.25;  // lambda_s
  double content_scale = 1.0;   // lambda_c
  int n_steps = 30;
  double train_dropout = 0.1;  // independent per condition

  nlohmann::json to_json() const {
    return {{"speaker_scale", speaker_scale},
            {"content_scale", content_scale},
            {"n_steps", n_steps},
            {"train_dropout", train_dropout}};
  }
  static GuidanceConfig from_json(const nlohmann::json& j) {
    GuidanceConfig g;
    g.speaker_scale = j.value("speaker_scale", 0.25);
    g.content_scale = j.value("content_scale", 1.0);
    g.n_steps = j.value("n_steps", 30);
    g.train_dropout = j.value("train_dropout", 0.1);
    return g;
  }
};

}  // namespace diffusion
}  // namespace revoice

#endif  // REVOICE_DIFFUSION_SCHEDULE_H_
