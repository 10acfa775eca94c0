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

#ifndef REVOICE_NN_MODULE_H_
#define REVOICE_NN_MODULE_H_

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "revoice/common/rng.h"
#include "revoice/nn/autodiff.h"

namespace revoice {
namespace nn {

// Owns the named parameter leaves of one trainable module.
class ParamStore {
 public:
  Var add(const std::string& name, Tensor init);
  const std::vector<std::pair<std::string, Var>>& entries() const { return entries_; }
  int64_t parameter_count() const;
  void zero_grads();
  bool has(const std::string& name) const;
  Var get(const std::string& name) const;

  std::vector<std::pair<std::string, const Tensor*>> named_tensors() const;
  // shape-checked bulk load; throws CorruptCheckpoint on missing/mismatched names
  void load(const std::map<std::string, Tensor>& named);

 private:
  std::vector<std::pair<std::string, Var>> entries_;
};

// truncated normal (resampled beyond 2 sigma)
Tensor trunc_normal_init(std::vector<int> shape, double stddev, Rng& rng);
Tensor ones_init(std::vector<int> shape);

// [frames, dim] interleaved sin/cos positions
Tensor sinusoidal_positions(int frames, int dim);
// [1, dim] embedding of a continuous time in [0, 1]
Tensor sinusoidal_time_embedding(double t, int dim);

}  // namespace nn
}  // namespace revoice

#endif  // REVOICE_NN_MODULE_H_
