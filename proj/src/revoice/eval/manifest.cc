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

#include "revoice/eval/manifest.h"

#include <filesystem>
#include <set>
#include <sstream>

#include "json.hpp"
#include "revoice/common/error.h"
#include "revoice/common/io.h"

namespace revoice {
namespace eval {

Manifest Manifest::load_jsonl(const std::string& path) {
  const std::string raw = read_file(path);
  Manifest m;
  std::istringstream ss(raw);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("manifest " + path + " line " + std::to_string(lineno) +
                        ": " + e.what());
    }
    ManifestRow row;
    row.utterance_id = j.at("utterance_id").get<std::string>();
    row.clean_path = j.at("clean_path").get<std::string>();
    row.degraded_path = j.value("degraded_path", "");
    row.enhanced_path = j.value("enhanced_path", "");
    row.speaker_id = j.value("speaker_id", "");
    if (j.contains("enrollment_paths")) {
      row.enrollment_paths = j.at("enrollment_paths").get<std::vector<std::string>>();
    }
    m.rows.push_back(std::move(row));
  }
  return m;
}

void Manifest::save_jsonl(const std::string& path) const {
  std::string out;
  for (const ManifestRow& row : rows) {
    nlohmann::json j = {{"utterance_id", row.utterance_id},
                        {"clean_path", row.clean_path},
                        {"speaker_id", row.speaker_id},
                        {"enrollment_paths", row.enrollment_paths}};
    if (!row.degraded_path.empty()) j["degraded_path"] = row.degraded_path;
    if (!row.enhanced_path.empty()) j["enhanced_path"] = row.enhanced_path;
    out += j.dump();
    out += "\n";
  }
  write_file(path, out);
}

void Manifest::validate(bool check_files) const {
  if (rows.empty()) throw EmptyManifest("manifest has no rows");
  std::set<std::string> ids;
  for (const ManifestRow& row : rows) {
    if (!ids.insert(row.utterance_id).second) {
      throw ConfigError("duplicate utterance_id: " + row.utterance_id);
    }
    if (check_files) {
      auto must_exist = [&](const std::string& p) {
        if (!p.empty() && !std::filesystem::exists(p)) {
          throw IoError("manifest references missing file: " + p);
        }
      };
      must_exist(row.clean_path);
      must_exist(row.degraded_path);
      must_exist(row.enhanced_path);
      for (const std::string& e : row.enrollment_paths) must_exist(e);
    }
  }
}

}  // namespace eval
}  // namespace revoice
