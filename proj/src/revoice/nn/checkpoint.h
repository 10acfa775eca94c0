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

#ifndef REVOICE_NN_CHECKPOINT_H_
#define REVOICE_NN_CHECKPOINT_H_

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "revoice/nn/module.h"
#include "revoice/nn/tensor.h"

namespace revoice {
namespace nn {

constexpr int kCheckpointFormatVersion = 1;

// Container layout: 8-byte magic, u64 LE header length, JSON header, raw
// little-endian float32 payload. The header carries format_version,
// config_hash, the full module config, the tensor directory (name -> shape,
// dtype, byte offset) and the payload SHA-256.
struct Checkpoint {
  nlohmann::json header;
  nlohmann::json config;
  std::string config_hash;
  std::map<std::string, Tensor> tensors;
};

std::string config_hash(const nlohmann::json& config);

void save_checkpoint(const std::string& path, const nlohmann::json& config,
                     const std::vector<std::pair<std::string, const Tensor*>>& tensors);

Checkpoint load_checkpoint(const std::string& path);

// Loads parameters into an existing store, enforcing that the stored
// config_hash matches the expected config (VersionMismatch otherwise).
void load_checkpoint_into(const std::string& path, const nlohmann::json& expected_config,
                          ParamStore& store);

}  // namespace nn
}  // namespace revoice

#endif  // REVOICE_NN_CHECKPOINT_H_
