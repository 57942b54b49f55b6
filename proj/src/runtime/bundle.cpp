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

#include "fusebox/runtime/bundle.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "fusebox/core/error.hpp"

namespace fs = std::filesystem;

namespace fusebox {
namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kInvalidArgument,
                "cannot read " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

std::vector<FunctionId> parse_manifest(std::string_view text) {
  std::vector<FunctionId> manifest;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) manifest.emplace_back(std::string(line));
    start = end + 1;
  }
  return manifest;
}

std::string format_manifest(const std::vector<FunctionId>& manifest) {
  std::string text;
  for (const auto& id : manifest) {
    text += id.str();
    text += '\n';
  }
  return text;
}

void validate_bundle_tree(const fs::path& root,
                          const std::vector<FunctionId>& manifest) {
  if (manifest.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "bundle " + root.string() + " has an empty manifest");
  }
  std::set<std::string> listed;
  for (const auto& id : manifest) {
    if (!listed.insert(id.str()).second) {
      throw Error(ErrorCode::kInvalidArgument,
                  "manifest lists '" + id.str() + "' twice");
    }
    auto dir = root / id.str();
    if (!fs::is_directory(dir)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "manifest entry '" + id.str() + "' has no subdirectory");
    }
    if (!fs::is_regular_file(dir / kEntryModule)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "function '" + id.str() + "' has no entry module");
    }
  }
  for (const auto& entry : fs::directory_iterator(root)) {
    if (!entry.is_directory()) continue;
    auto name = entry.path().filename().string();
    if (!listed.contains(name)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "subdirectory '" + name + "' is not in the manifest");
    }
  }
}

Bundle Bundle::open(const fs::path& root) {
  if (!fs::is_directory(root)) {
    throw Error(ErrorCode::kInvalidArgument,
                "bundle root " + root.string() + " is not a directory");
  }
  auto manifest = parse_manifest(read_file(root / kManifestFile));
  validate_bundle_tree(root, manifest);
  return Bundle(root, std::move(manifest));
}

Bundle Bundle::create(const fs::path& root,
                      const std::vector<FunctionId>& manifest) {
  validate_bundle_tree(root, manifest);
  std::ofstream out(root / kManifestFile, std::ios::binary | std::ios::trunc);
  out << format_manifest(manifest);
  if (!out) {
    throw Error(ErrorCode::kInternal,
                "cannot write manifest in " + root.string());
  }
  return Bundle(root, manifest);
}

Bundle Bundle::copy_to(const fs::path& destination) const {
  copy_tree(root_, destination);
  return open(destination);
}

void copy_tree(const fs::path& from, const fs::path& to) {
  if (fs::exists(to)) {
    throw Error(ErrorCode::kConflict, to.string() + " already exists");
  }
  std::error_code ec;
  fs::create_directories(to.parent_path(), ec);
  fs::copy(from, to, fs::copy_options::recursive, ec);
  if (ec) {
    throw Error(ErrorCode::kInternal, "copy " + from.string() + " -> " +
                                          to.string() + ": " + ec.message());
  }
}

}  // namespace fusebox
