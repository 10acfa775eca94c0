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

#ifndef REVOICE_COMMON_IO_H_
#define REVOICE_COMMON_IO_H_

#include <string>

namespace revoice {

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

std::string sha256_hex(const void* data, size_t len);
std::string sha256_hex(const std::string& s);

}  // namespace revoice

#endif  // REVOICE_COMMON_IO_H_
