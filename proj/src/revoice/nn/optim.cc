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

#include "revoice/nn/optim.h"

#include <cmath>

namespace revoice {
namespace nn {

void validate_optimizer_config(const OptimizerConfig& cfg) {
  if (cfg.kind != "adam" && cfg.kind != "adamw") {
    throw ConfigError("optimizer kind must be adam or adamw");
  }
  if (cfg.learning_rate < 0.0) throw ConfigError("learning_rate must be >= 0");
  if (cfg.decay_gamma <= 0.0 || cfg.decay_gamma > 1.0) {
    throw ConfigError("decay_gamma must be in (0, 1]");
  }
  if (cfg.batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (cfg.epochs < 0) throw ConfigError("epochs must be >= 0");
}

Optimizer::Optimizer(ParamStore& store, OptimizerConfig cfg)
    : Optimizer(std::vector<ParamStore*>{&store}, std::move(cfg)) {}

Optimizer::Optimizer(std::vector<ParamStore*> stores, OptimizerConfig cfg)
    : stores_(std::move(stores)), cfg_(std::move(cfg)) {
  validate_optimizer_config(cfg_);
  for (ParamStore* store : stores_) {
    for (const auto& [name, var] : store->entries()) {
      const size_t n = static_cast<size_t>(var.value().numel());
      m_.emplace_back(n, 0.0);
      v_.emplace_back(n, 0.0);
    }
  }
}

void Optimizer::zero_grad() {
  for (ParamStore* store : stores_) store->zero_grads();
}

void Optimizer::set_epoch(int epoch) {
  lr_scale_ = std::pow(cfg_.decay_gamma, epoch);
}

void Optimizer::step() {
  ++t_;
  const double lr = current_lr();
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  const bool decoupled = cfg_.kind == "adamw";
  size_t pi = 0;
  for (ParamStore* store : stores_) {
    for (const auto& [name, entry] : store->entries()) {
      Var var = entry;
      Tensor& p = var.mutable_value();
      Tensor& g = var.grad();
      std::vector<double>& m = m_[pi];
      std::vector<double>& v = v_[pi];
      ++pi;
      for (int64_t i = 0; i < p.numel(); ++i) {
        const double gi = g.flat(i);
        m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * gi;
        v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * gi * gi;
        const double mhat = m[i] / bc1;
        const double vhat = v[i] / bc2;
        double pv = p.flat(i);
        if (decoupled) pv -= lr * cfg_.weight_decay * pv;
        pv -= lr * mhat / (std::sqrt(vhat) + cfg_.eps);
        p.flat(i) = static_cast<float>(pv);
      }
    }
  }
}

double train_step(Optimizer& opt, const std::function<Var()>& build_loss) {
  opt.zero_grad();
  Var loss = build_loss();
  if (loss.value().numel() != 1) throw ShapeMismatch("loss must be scalar");
  const double value = loss.value().flat(0);
  if (!std::isfinite(value)) {
    throw NonFiniteLoss("loss = " + std::to_string(value) + " at step");
  }
  backward(loss);
  opt.step();
  return value;
}

}  // namespace nn
}  // namespace revoice
