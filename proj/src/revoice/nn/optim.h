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

#ifndef REVOICE_NN_OPTIM_H_
#define REVOICE_NN_OPTIM_H_

#include <functional>
#include <string>
#include <vector>

#include "revoice/nn/module.h"

namespace revoice {
namespace nn {

struct OptimizerConfig {
  std::string kind = "adamw";  // adam | adamw
  double learning_rate = 2e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.01;  // adamw only, decoupled
  double decay_gamma = 1.0;    // per-epoch exponential lr factor
  int batch_size = 32;
  int epochs = 100;
};

void validate_optimizer_config(const OptimizerConfig& cfg);

class Optimizer {
 public:
  Optimizer(ParamStore& store, OptimizerConfig cfg);
  // joint training across several modules
  Optimizer(std::vector<ParamStore*> stores, OptimizerConfig cfg);
  void zero_grad();
  void step();
  void set_epoch(int epoch);  // lr = lr0 * gamma^epoch
  double current_lr() const { return cfg_.learning_rate * lr_scale_; }
  const OptimizerConfig& config() const { return cfg_; }

 private:
  std::vector<ParamStore*> stores_;
  OptimizerConfig cfg_;
  int64_t t_ = 0;
  double lr_scale_ = 1.0;
  std::vector<std::vector<double>> m_, v_;  // flattened over stores' params
};

/// Zero grads, build the loss graph, check finiteness, backprop, apply one
/// optimizer step. Returns the loss value.
double train_step(Optimizer& opt, const std::function<Var()>& build_loss);

}  // namespace nn
}  // namespace revoice

#endif  // REVOICE_NN_OPTIM_H_
