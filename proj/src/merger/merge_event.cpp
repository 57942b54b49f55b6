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

#include "fusebox/merger/merge_event.hpp"

#include <fstream>

#include "fusebox/core/error.hpp"
#include "fusebox/merger/wire.hpp"

namespace fusebox {

std::string_view to_string(MergeOutcome outcome) {
  switch (outcome) {
    case MergeOutcome::kCompleted: return "Completed";
    case MergeOutcome::kAbortedHealthFailure: return "AbortedHealthFailure";
    case MergeOutcome::kAbortedStale: return "AbortedStale";
    case MergeOutcome::kAbortedDeployFailure: return "AbortedDeployFailure";
  }
  return "?";
}

MergeOutcome merge_outcome_from_string(std::string_view text) {
  for (auto outcome :
       {MergeOutcome::kCompleted, MergeOutcome::kAbortedHealthFailure,
        MergeOutcome::kAbortedStale, MergeOutcome::kAbortedDeployFailure}) {
    if (to_string(outcome) == text) return outcome;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown merge outcome '" + std::string(text) + "'");
}

MergeEventLog::MergeEventLog(std::filesystem::path path)
    : path_(std::move(path)) {
  if (!path_.empty() && path_.has_parent_path()) {
    std::filesystem::create_directories(path_.parent_path());
  }
}

void MergeEventLog::append(const MergeEvent& event) {
  std::lock_guard lock(mutex_);
  events_.push_back(event);
  if (path_.empty()) return;
  std::ofstream out(path_, std::ios::app);
  out << to_json(event).dump() << '\n';
}

std::vector<MergeEvent> MergeEventLog::events() const {
  std::lock_guard lock(mutex_);
  return events_;
}

std::vector<MergeEvent> MergeEventLog::read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kNotFound, "cannot open " + path.string());
  std::vector<MergeEvent> events;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    events.push_back(merge_event_from_json(nlohmann::json::parse(line)));
  }
  return events;
}

}  // namespace fusebox
