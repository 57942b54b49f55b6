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
#include <vector>

#include "fusebox/core/types.hpp"

namespace fusebox {

inline constexpr const char* kManifestFile = "manifest";
inline constexpr const char* kEntryModule = "fn";

/// A function-code tree on disk:
///
///   <root>/manifest        one FunctionId per line, deployment order
///   <root>/<FunctionId>/   entry module `fn` plus arbitrary support files
///
/// A Bundle value is always valid: construction goes through open() or
/// create(), both of which check the manifest against the directory tree.
class Bundle {
 public:
  // Reads and validates an existing tree. Throws Error(kInvalidArgument).
  static Bundle open(const std::filesystem::path& root);

  // Writes the manifest for an already populated tree, then validates it.
  static Bundle create(const std::filesystem::path& root,
                       const std::vector<FunctionId>& manifest);

  const std::filesystem::path& root() const noexcept { return root_; }
  const std::vector<FunctionId>& manifest() const noexcept { return manifest_; }
  std::filesystem::path function_dir(const FunctionId& id) const {
    return root_ / id.str();
  }

  // Copies the whole tree to `destination` (must not exist) and opens it.
  Bundle copy_to(const std::filesystem::path& destination) const;

 private:
  Bundle(std::filesystem::path root, std::vector<FunctionId> manifest)
      : root_(std::move(root)), manifest_(std::move(manifest)) {}

  std::filesystem::path root_;
  std::vector<FunctionId> manifest_;
};

std::vector<FunctionId> parse_manifest(std::string_view text);
std::string format_manifest(const std::vector<FunctionId>& manifest);

// Checks the tree invariants without constructing a Bundle.
void validate_bundle_tree(const std::filesystem::path& root,
                          const std::vector<FunctionId>& manifest);

/// Recursive copy that fails instead of overwriting existing files.
void copy_tree(const std::filesystem::path& from,
               const std::filesystem::path& to);

}  // namespace fusebox
