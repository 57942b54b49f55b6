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

#include "fusebox/bench/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "fusebox/core/error.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace fusebox::bench {
namespace {

LatencySummary summarize(const std::vector<double>& latencies) {
  LatencySummary summary;
  summary.count = latencies.size();
  if (latencies.empty()) return summary;
  summary.median_ms = percentile(latencies, 0.5);
  summary.p95_ms = percentile(latencies, 0.95);
  summary.mean_ms = std::accumulate(latencies.begin(), latencies.end(), 0.0) /
                    static_cast<double>(latencies.size());
  return summary;
}

ModeSummary summarize(const RunRecord& record, double window_start) {
  ModeSummary summary;
  std::vector<double> all;
  std::vector<double> steady;
  for (const auto& r : record.requests) {
    if (!r.ok()) continue;
    all.push_back(r.latency_ms);
    if (r.sent_ms >= window_start) steady.push_back(r.latency_ms);
  }
  summary.overall = summarize(all);
  summary.steady = summarize(steady);
  summary.failures = record.failures();

  if (!record.samples.empty()) {
    summary.instances_initial = record.samples.front().instances;
    summary.instances_final = record.samples.back().instances;
  }
  std::vector<double> counts;
  double rss_total = 0;
  for (const auto& s : record.samples) {
    if (s.t_ms < window_start) continue;
    counts.push_back(static_cast<double>(s.instances));
    rss_total += static_cast<double>(s.rss_bytes);
  }
  if (!counts.empty()) {
    summary.instances_steady =
        static_cast<std::size_t>(std::llround(percentile(counts, 0.5)));
    summary.rss_steady_mean_bytes = rss_total / static_cast<double>(counts.size());
  }
  return summary;
}

double reduction_pct(double before, double after) {
  return before == 0 ? 0.0 : (before - after) / before * 100.0;
}

json to_json(const LatencySummary& s) {
  return {{"count", s.count},
          {"median_ms", s.median_ms},
          {"p95_ms", s.p95_ms},
          {"mean_ms", s.mean_ms}};
}

json to_json(const ModeSummary& s) {
  return {{"overall", to_json(s.overall)},
          {"steady", to_json(s.steady)},
          {"failures", s.failures},
          {"instances_initial", s.instances_initial},
          {"instances_final", s.instances_final},
          {"instances_steady", s.instances_steady},
          {"rss_steady_mean_bytes", s.rss_steady_mean_bytes}};
}

}  // namespace

double percentile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  q = std::clamp(q, 0.0, 1.0);
  double rank = q * static_cast<double>(values.size() - 1);
  auto lo = static_cast<std::size_t>(std::floor(rank));
  auto hi = static_cast<std::size_t>(std::ceil(rank));
  double frac = rank - static_cast<double>(lo);
  return values[lo] + (values[hi] - values[lo]) * frac;
}

double steady_window_start(const RunRecord& record) {
  auto times = record.merge_times_ms();
  return times.empty() ? 0.0 : 2.0 * times.back();
}

Comparison compare_runs(const RunRecord& baseline, const RunRecord& candidate) {
  for (const auto* record : {&baseline, &candidate}) {
    if (!record->valid) {
      throw Error(ErrorCode::kInvalidArgument,
                  "refusing to compare an invalid record: " +
                      record->invalid_reason);
    }
  }
  const auto& a = baseline.params;
  const auto& b = candidate.params;
  if (a.app != b.app || a.requests != b.requests || a.rate != b.rate ||
      a.hop_delay_ms != b.hop_delay_ms ||
      a.compute_delay_ms != b.compute_delay_ms) {
    throw Error(ErrorCode::kInvalidArgument,
                "records were produced with different workload parameters");
  }

  Comparison c;
  c.params = b;
  c.steady_window_start_ms =
      std::max(steady_window_start(baseline), steady_window_start(candidate));
  c.baseline = summarize(baseline, c.steady_window_start_ms);
  c.candidate = summarize(candidate, c.steady_window_start_ms);
  c.latency_reduction_ms =
      c.baseline.steady.median_ms - c.candidate.steady.median_ms;
  c.latency_reduction_pct =
      reduction_pct(c.baseline.steady.median_ms, c.candidate.steady.median_ms);
  c.rss_reduction_pct = reduction_pct(c.baseline.rss_steady_mean_bytes,
                                      c.candidate.rss_steady_mean_bytes);
  c.instance_reduction_pct =
      reduction_pct(static_cast<double>(c.baseline.instances_steady),
                    static_cast<double>(c.candidate.instances_steady));
  c.merge_markers_ms = candidate.merge_times_ms();

  std::map<std::size_t, const RequestRecord*> by_index;
  for (const auto& r : baseline.requests) by_index[r.index] = &r;
  for (const auto& r : candidate.requests) {
    auto it = by_index.find(r.index);
    if (it == by_index.end() || it->second->body != r.body ||
        it->second->status != r.status) {
      ++c.response_mismatches;
    }
  }
  c.response_mismatches += baseline.requests.size() > candidate.requests.size()
                               ? baseline.requests.size() - candidate.requests.size()
                               : 0;
  return c;
}

json to_json(const Comparison& c) {
  return {{"app", c.params.app},
          {"requests", c.params.requests},
          {"rate", c.params.rate},
          {"hop_delay_ms", c.params.hop_delay_ms},
          {"compute_delay_ms", c.params.compute_delay_ms},
          {"steady_window_start_ms", c.steady_window_start_ms},
          {"baseline", to_json(c.baseline)},
          {"candidate", to_json(c.candidate)},
          {"latency_reduction_ms", c.latency_reduction_ms},
          {"latency_reduction_pct", c.latency_reduction_pct},
          {"rss_reduction_pct", c.rss_reduction_pct},
          {"instance_reduction_pct", c.instance_reduction_pct},
          {"merge_markers_ms", c.merge_markers_ms},
          {"response_mismatches", c.response_mismatches}};
}

void write_report(const Comparison& comparison, const RunRecord& baseline,
                  const RunRecord& candidate, const fs::path& out) {
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  {
    std::ofstream doc(out, std::ios::trunc);
    doc << to_json(comparison).dump(2) << '\n';
    if (!doc) throw Error(ErrorCode::kInternal, "cannot write " + out.string());
  }
  auto sibling = [&](const char* suffix) {
    auto path = out;
    path += suffix;
    return std::ofstream(path, std::ios::trunc);
  };
  auto latency = sibling(".latency.csv");
  latency << "run,index,t_ms,latency_ms,status\n";
  auto resources = sibling(".resources.csv");
  resources << "run,t_ms,instance_count,rss_sum_bytes\n";
  for (const auto& [label, record] :
       {std::pair{"baseline", &baseline}, std::pair{"candidate", &candidate}}) {
    for (const auto& r : record->requests) {
      latency << label << ',' << r.index << ',' << r.sent_ms << ','
              << r.latency_ms << ',' << r.status << '\n';
    }
    for (const auto& s : record->samples) {
      resources << label << ',' << s.t_ms << ',' << s.instances << ','
                << s.rss_bytes << '\n';
    }
  }
  auto markers = sibling(".markers.csv");
  markers << "t_ms,new_instance,outcome\n";
  for (const auto& event : candidate.merges) {
    markers << (event.completed_at_ms - candidate.started_at_ms) << ','
            << (event.new_instance ? event.new_instance->str() : "") << ','
            << to_string(event.outcome) << '\n';
  }
}

}  // namespace fusebox::bench
