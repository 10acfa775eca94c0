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

#ifndef REVOICE_CLI_CLI_H_
#define REVOICE_CLI_CLI_H_

#include <string>
#include <vector>

namespace revoice {
namespace cli {

// Subcommands: degrade, fit-codebook, train --stage {gsr|speaker|vc},
// enhance --mode {gsr|vc-mel|vc-ssl|gsr+vc}, evaluate, ablate.
// Exit codes: 0 success, 1 usage error, 2 runtime error. Every run writes a
// resolved-config snapshot next to its outputs.
int dispatch(const std::vector<std::string>& args);
int dispatch(int argc, const char* const* argv);

}  // namespace cli
}  // namespace revoice

#endif  // REVOICE_CLI_CLI_H_
