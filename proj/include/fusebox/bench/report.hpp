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

#include <json.hpp>

#include "fusebox/bench/run_record.hpp"

namespace fusebox::bench {

// Linear interpolation between closest ranks; q in [0, 1].
double percentile(std::vector<double> values, double q);

struct LatencySummary {
  std::size_t count = 0;
  double median_ms = 0;
  double p95_ms = 0;
  double mean_ms = 0;
};

struct ModeSummary {
  LatencySummary overall;
  LatencySummary steady;
  std::size_t failures = 0;
  std::size_t instances_initial = 0;
  std::size_t instances_final = 0;
  std::size_t instances_steady = 0;
  double rss_steady_mean_bytes = 0;
};

struct Comparison {
  RunParams params;
  // Both records are summarized over [window start, run end]; the start is
  // twice the later of the two records' last completed merge.
  double steady_window_start_ms = 0;
  ModeSummary baseline;
  ModeSummary candidate;
  double latency_reduction_ms = 0;
  double latency_reduction_pct = 0;
  double rss_reduction_pct = 0;
  double instance_reduction_pct = 0;
  std::vector<double> merge_markers_ms;
  // Request indices whose bodies differ between the two runs.
  std::size_t response_mismatches = 0;
};

double steady_window_start(const RunRecord& record);

// Throws Error(kInvalidArgument) if either record is invalid or the
// workload parameters differ.
Comparison compare_runs(const RunRecord& baseline, const RunRecord& candidate);

nlohmann::json to_json(const Comparison& comparison);

// Writes `out` (JSON document) plus `<out>.latency.csv`,
// `<out>.resources.csv` and `<out>.markers.csv` next to it.
void write_report(const Comparison& comparison, const RunRecord& baseline,
                  const RunRecord& candidate, const std::filesystem::path& out);

}  // namespace fusebox::bench
