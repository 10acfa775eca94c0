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

#include "revoice/nn/module.h"

#include <cmath>

namespace revoice {
namespace nn {

Var ParamStore::add(const std::string& name, Tensor init) {
  for (const auto& [n, v] : entries_) {
    if (n == name) throw ShapeMismatch("duplicate parameter name: " + name);
  }
  Var v = Var::leaf(std::move(init), true);
  entries_.emplace_back(name, v);
  return v;
}

int64_t ParamStore::parameter_count() const {
  int64_t total = 0;
  for (const auto& [n, v] : entries_) total += v.value().numel();
  return total;
}

void ParamStore::zero_grads() {
  for (auto& [n, v] : entries_) const_cast<Var&>(v).zero_grad();
}

bool ParamStore::has(const std::string& name) const {
  for (const auto& [n, v] : entries_) {
    if (n == name) return true;
  }
  return false;
}

Var ParamStore::get(const std::string& name) const {
  for (const auto& [n, v] : entries_) {
    if (n == name) return v;
  }
  throw ShapeMismatch("unknown parameter: " + name);
}

std::vector<std::pair<std::string, const Tensor*>> ParamStore::named_tensors() const {
  std::vector<std::pair<std::string, const Tensor*>> out;
  out.reserve(entries_.size());
  for (const auto& [n, v] : entries_) out.emplace_back(n, &v.value());
  return out;
}

void ParamStore::load(const std::map<std::string, Tensor>& named) {
  for (auto& [name, var] : entries_) {
    auto it = named.find(name);
    if (it == named.end()) {
      throw CorruptCheckpoint("checkpoint missing tensor: " + name);
    }
    if (!it->second.same_shape(var.value())) {
      throw CorruptCheckpoint("checkpoint shape mismatch for " + name + ": " +
                              it->second.shape_str() + " vs " +
                              var.value().shape_str());
    }
    const_cast<Var&>(var).mutable_value() = it->second;
  }
}

Tensor trunc_normal_init(std::vector<int> shape, double stddev, Rng& rng) {
  Tensor t(std::move(shape));
  for (int64_t i = 0; i < t.numel(); ++i) {
    double z = rng.normal();
    while (std::abs(z) > 2.0) z = rng.normal();
    t.flat(i) = static_cast<float>(z * stddev);
  }
  return t;
}

Tensor ones_init(std::vector<int> shape) { return Tensor::full(std::move(shape), 1.0f); }

Tensor sinusoidal_positions(int frames, int dim) {
  Tensor t({frames, dim});
  const int half = dim / 2;
  for (int p = 0; p < frames; ++p) {
    for (int i = 0; i < half; ++i) {
      const double freq = std::exp(-std::log(10000.0) * i / std::max(1, half - 1));
      t.at2(p, 2 * i) = static_cast<float>(std::sin(p * freq));
      t.at2(p, 2 * i + 1) = static_cast<float>(std::cos(p * freq));
    }
  }
  return t;
}

Tensor sinusoidal_time_embedding(double t, int dim) {
  Tensor e({1, dim});
  const int half = dim / 2;
  for (int i = 0; i < half; ++i) {
    const double freq = std::exp(-std::log(10000.0) * i / std::max(1, half - 1));
    const double arg = 1000.0 * t * freq;
    e.at2(0, 2 * i) = static_cast<float>(std::sin(arg));
    e.at2(0, 2 * i + 1) = static_cast<float>(std::cos(arg));
  }
  return e;
}

}  // namespace nn
}  // namespace revoice
