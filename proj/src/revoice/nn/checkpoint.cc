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

#include "revoice/nn/checkpoint.h"

#include <cstring>

#include "revoice/common/error.h"
#include "revoice/common/io.h"

namespace revoice {
namespace nn {

namespace {
constexpr char kMagic[8] = {'R', 'V', 'C', 'K', 'P', 'T', '0', '1'};

static_assert(sizeof(float) == 4, "float32 layout assumed");
}  // namespace

std::string config_hash(const nlohmann::json& config) {
  return sha256_hex(config.dump());
}

void save_checkpoint(const std::string& path, const nlohmann::json& config,
                     const std::vector<std::pair<std::string, const Tensor*>>& tensors) {
  std::string payload;
  nlohmann::json dir = nlohmann::json::object();
  uint64_t offset = 0;
  for (const auto& [name, t] : tensors) {
    const size_t bytes = static_cast<size_t>(t->numel()) * 4;
    const size_t pos = payload.size();
    payload.resize(pos + bytes);
    std::memcpy(payload.data() + pos, t->data(), bytes);
    dir[name] = {{"shape", t->shape()}, {"dtype", "float32"}, {"offset", offset}};
    offset += bytes;
  }
  nlohmann::json header = {
      {"format_version", kCheckpointFormatVersion},
      {"config_hash", config_hash(config)},
      {"config", config},
      {"tensors", dir},
      {"payload_sha256", sha256_hex(payload)},
  };
  const std::string header_str = header.dump();
  std::string out;
  out.append(kMagic, sizeof(kMagic));
  uint64_t hlen = header_str.size();
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((hlen >> (8 * i)) & 0xff));
  out += header_str;
  out += payload;
  write_file(path, out);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::string raw;
  try {
    raw = read_file(path);
  } catch (const IoError& e) {
    throw CorruptCheckpoint(std::string("cannot read checkpoint: ") + e.what());
  }
  if (raw.size() < 16 || std::memcmp(raw.data(), kMagic, sizeof(kMagic)) != 0) {
    throw CorruptCheckpoint("bad magic: " + path);
  }
  uint64_t hlen = 0;
  for (int i = 0; i < 8; ++i) {
    hlen |= static_cast<uint64_t>(static_cast<uint8_t>(raw[8 + i])) << (8 * i);
  }
  if (16 + hlen > raw.size()) throw CorruptCheckpoint("truncated header: " + path);
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(raw.substr(16, hlen));
  } catch (const nlohmann::json::exception&) {
    throw CorruptCheckpoint("unparsable header: " + path);
  }
  const int version = header.value("format_version", -1);
  if (version != kCheckpointFormatVersion) {
    throw VersionMismatch("checkpoint format_version " + std::to_string(version) +
                          " != " + std::to_string(kCheckpointFormatVersion));
  }
  const std::string payload = raw.substr(16 + hlen);
  if (sha256_hex(payload) != header.value("payload_sha256", "")) {
    throw CorruptCheckpoint("payload hash mismatch: " + path);
  }

  Checkpoint ckpt;
  ckpt.header = header;
  ckpt.config = header.at("config");
  ckpt.config_hash = header.at("config_hash").get<std::string>();
  for (const auto& [name, meta] : header.at("tensors").items()) {
    const std::vector<int> shape = meta.at("shape").get<std::vector<int>>();
    const uint64_t offset = meta.at("offset").get<uint64_t>();
    const int64_t n = Tensor::count(shape);
    if (offset + static_cast<uint64_t>(n) * 4 > payload.size()) {
      throw CorruptCheckpoint("tensor " + name + " exceeds payload: " + path);
    }
    Tensor t(shape);
    std::memcpy(t.data(), payload.data() + offset, static_cast<size_t>(n) * 4);
    ckpt.tensors.emplace(name, std::move(t));
  }
  return ckpt;
}

void load_checkpoint_into(const std::string& path, const nlohmann::json& expected_config,
                          ParamStore& store) {
  Checkpoint ckpt = load_checkpoint(path);
  if (ckpt.config_hash != config_hash(expected_config)) {
    throw VersionMismatch("checkpoint config hash mismatch: " + path);
  }
  store.load(ckpt.tensors);
}

}  // namespace nn
}  // namespace revoice
