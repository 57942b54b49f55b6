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

#include "fusebox/runtime/bundle.hpp"

namespace fusebox {

/// Identifier-preserving merge: every per-function subdirectory of `a` and
/// `b` is copied under its own name into `destination`, and the manifest is
/// a's entries followed by b's. Throws Error(kConflict) if the manifests
/// overlap; nothing is ever overwritten.
Bundle merge_bundles(const Bundle& a, const Bundle& b,
                     const std::filesystem::path& destination);

}  // namespace fusebox
