// Copyright 2026 The Fusebox Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace fusebox {

// POSIX ustar archives of plain files and directories. This is the upload
// format of the deploy endpoint, so `tar -cf fn.tar -C dir .` works as a
// client.

std::string pack_directory(const std::filesystem::path& root);

// Extracts into `destination` (created if missing). Rejects absolute paths,
// `..` components, links and device entries with Error(kInvalidArgument).
void unpack_archive(std::string_view archive,
                    const std::filesystem::path& destination);

}  // namespace fusebox
