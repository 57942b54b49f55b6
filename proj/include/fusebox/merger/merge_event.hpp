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

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fusebox/core/types.hpp"

namespace fusebox {

enum class MergeOutcome {
  kCompleted,
  kAbortedHealthFailure,
  kAbortedStale,
  // Spawn failure, port exhaustion or conflicting environments.
  kAbortedDeployFailure,
};

std::string_view to_string(MergeOutcome outcome);
MergeOutcome merge_outcome_from_string(std::string_view text);

struct MergeEvent {
  InstanceId source_a;
  InstanceId source_b;
  std::set<FunctionId> functions_a;
  std::set<FunctionId> functions_b;
  std::optional<InstanceId> new_instance;
  MergeOutcome outcome = MergeOutcome::kCompleted;
  std::int64_t created_at_ms = 0;
  std::int64_t completed_at_ms = 0;
  std::uint64_t routing_generation = 0;
  std::string detail;
};

/// Append-only, line-delimited record stream of merge events. Each line is a
/// self-contained JSON object.
class MergeEventLog {
 public:
  // Empty path keeps events in memory only.
  explicit MergeEventLog(std::filesystem::path path = {});

  void append(const MergeEvent& event);
  std::vector<MergeEvent> events() const;

  static std::vector<MergeEvent> read(const std::filesystem::path& path);

 private:
  std::filesystem::path path_;
  mutable std::mutex mutex_;
  std::vector<MergeEvent> events_;
};

}  // namespace fusebox
