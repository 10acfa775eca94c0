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

#ifndef REVOICE_EVAL_MANIFEST_H_
#define REVOICE_EVAL_MANIFEST_H_

#include <string>
#include <vector>

namespace revoice {
namespace eval {

// One JSONL row: {utterance_id, clean_path, degraded_path?, enhanced_path?,
// speaker_id, enrollment_paths}. Optional paths are empty strings here.
struct ManifestRow {
  std::string utterance_id;
  std::string clean_path;
  std::string degraded_path;
  std::string enhanced_path;
  std::string speaker_id;
  std::vector<std::string> enrollment_paths;
};

struct Manifest {
  std::vector<ManifestRow> rows;

  static Manifest load_jsonl(const std::string& path);
  void save_jsonl(const std::string& path) const;
  // unique utterance ids; referenced files exist
  void validate(bool check_files = true) const;
};

}  // namespace eval
}  // namespace revoice

#endif  // REVOICE_EVAL_MANIFEST_H_
