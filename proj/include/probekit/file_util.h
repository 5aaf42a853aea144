// Copyright 2026 The ProbeKit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PROBEKIT_FILE_UTIL_H_
#define PROBEKIT_FILE_UTIL_H_

#include <filesystem>
#include <string>
#include <string_view>

namespace probekit {

// Writes to a sibling temporary file and renames it over `path`.
void WriteFileAtomic(const std::filesystem::path& path,
                     std::string_view contents);

std::string ReadFile(const std::filesystem::path& path);

// Lowercase hex SHA-256 of the file contents.
std::string Sha256File(const std::filesystem::path& path);

}  // namespace probekit

#endif  // PROBEKIT_FILE_UTIL_H_
