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
#include <iosfwd>
#include <string>
#include <vector>

#include "fusebox/merger/merge_event.hpp"

namespace fusebox::bench {

enum class Mode { kVanilla, kFusion };

std::string_view to_string(Mode mode);
Mode parse_mode(std::string_view text);

struct RunParams {
  std::string app;
  Mode mode = Mode::kVanilla;
  std::size_t requests = 0;
  double rate = 0;
  int hop_delay_ms = 0;
  int compute_delay_ms = 0;
};

struct RequestRecord {
  std::size_t index = 0;
  double sent_ms = 0;     // relative to run start
  double latency_ms = 0;
  int status = 0;         // 0: transport failure
  std::string body;

  bool ok() const { return status == 200; }
};

struct ResourceSample {
  double t_ms = 0;
  std::size_t instances = 0;
  std::uint64_t rss_bytes = 0;
};

struct RunRecord {
  RunParams params;
  bool valid = true;
  std::string invalid_reason;
  std::int64_t started_at_ms = 0;
  double duration_ms = 0;
  std::vector<RequestRecord> requests;
  std::vector<MergeEvent> merges;
  std::vector<ResourceSample> samples;

  std::size_t failures() const;
  // Completion times of Completed merges relative to run start, ascending.
  std::vector<double> merge_times_ms() const;
};

// Line-delimited JSON: one "run" header line, then one line per request,
// merge event and resource sample.
void write_run_record(const RunRecord& record, std::ostream& out);
RunRecord read_run_record(std::istream& in);
void save_run_record(const RunRecord& record, const std::filesystem::path& path);
RunRecord load_run_record(const std::filesystem::path& path);

}  // namespace fusebox::bench
