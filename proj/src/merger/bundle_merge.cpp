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

#include "fusebox/merger/bundle_merge.hpp"

#include <set>

#include "fusebox/core/error.hpp"

namespace fs = std::filesystem;

namespace fusebox {

Bundle merge_bundles(const Bundle& a, const Bundle& b,
                     const fs::path& destination) {
  std::set<FunctionId> seen(a.manifest().begin(), a.manifest().end());
  for (const auto& id : b.manifest()) {
    if (seen.contains(id)) {
      throw Error(ErrorCode::kConflict,
                  "function '" + id.str() + "' is present in both bundles");
    }
  }
  if (fs::exists(destination)) {
    throw Error(ErrorCode::kConflict, destination.string() + " already exists");
  }
  fs::create_directories(destination);

  std::vector<FunctionId> manifest;
  for (const auto* source : {&a, &b}) {
    for (const auto& id : source->manifest()) {
      copy_tree(source->function_dir(id), destination / id.str());
      manifest.push_back(id);
    }
  }
  return Bundle::create(destination, manifest);
}

}  // namespace fusebox
