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

#include "fusebox/bench/run_record.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "fusebox/core/error.hpp"
#include "fusebox/merger/wire.hpp"

using nlohmann::json;

namespace fusebox::bench {

std::string_view to_string(Mode mode) {
  return mode == Mode::kVanilla ? "vanilla" : "fusion";
}

Mode parse_mode(std::string_view text) {
  if (text == "vanilla") return Mode::kVanilla;
  if (text == "fusion") return Mode::kFusion;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown mode '" + std::string(text) + "'");
}

std::size_t RunRecord::failures() const {
  return static_cast<std::size_t>(
      std::count_if(requests.begin(), requests.end(),
                    [](const RequestRecord& r) { return !r.ok(); }));
}

std::vector<double> RunRecord::merge_times_ms() const {
  std::vector<double> times;
  for (const auto& event : merges) {
    if (event.outcome != MergeOutcome::kCompleted) continue;
    times.push_back(static_cast<double>(event.completed_at_ms - started_at_ms));
  }
  std::sort(times.begin(), times.end());
  return times;
}

void write_run_record(const RunRecord& record, std::ostream& out) {
  const auto& p = record.params;
  out << json{{"type", "run"},
              {"app", p.app},
              {"mode", std::string(to_string(p.mode))},
              {"requests", p.requests},
              {"rate", p.rate},
              {"hop_delay_ms", p.hop_delay_ms},
              {"compute_delay_ms", p.compute_delay_ms},
              {"valid", record.valid},
              {"invalid_reason", record.invalid_reason},
              {"started_at_ms", record.started_at_ms},
              {"duration_ms", record.duration_ms}}
             .dump()
      << '\n';
  for (const auto& r : record.requests) {
    out << json{{"type", "request"},
                {"index", r.index},
                {"sent_ms", r.sent_ms},
                {"latency_ms", r.latency_ms},
                {"status", r.status},
                {"body", r.body}}
               .dump()
        << '\n';
  }
  for (const auto& event : record.merges) {
    auto doc = to_json(event);
    doc["type"] = "merge";
    out << doc.dump() << '\n';
  }
  for (const auto& s : record.samples) {
    out << json{{"type", "sample"},
                {"t_ms", s.t_ms},
                {"instances", s.instances},
                {"rss_bytes", s.rss_bytes}}
               .dump()
        << '\n';
  }
}

RunRecord read_run_record(std::istream& in) {
  RunRecord record;
  bool have_header = false;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto doc = json::parse(line, nullptr, false);
    if (doc.is_discarded() || !doc.contains("type")) {
      throw Error(ErrorCode::kInvalidArgument, "malformed run record line");
    }
    auto type = doc["type"].get<std::string>();
    if (type == "run") {
      auto& p = record.params;
      p.app = doc.at("app").get<std::string>();
      p.mode = parse_mode(doc.at("mode").get<std::string>());
      p.requests = doc.at("requests").get<std::size_t>();
      p.rate = doc.at("rate").get<double>();
      p.hop_delay_ms = doc.at("hop_delay_ms").get<int>();
      p.compute_delay_ms = doc.at("compute_delay_ms").get<int>();
      record.valid = doc.at("valid").get<bool>();
      record.invalid_reason = doc.value("invalid_reason", std::string{});
      record.started_at_ms = doc.at("started_at_ms").get<std::int64_t>();
      record.duration_ms = doc.value("duration_ms", 0.0);
      have_header = true;
    } else if (type == "request") {
      record.requests.push_back({doc.at("index").get<std::size_t>(),
                                 doc.at("sent_ms").get<double>(),
                                 doc.at("latency_ms").get<double>(),
                                 doc.at("status").get<int>(),
                                 doc.at("body").get<std::string>()});
    } else if (type == "merge") {
      record.merges.push_back(merge_event_from_json(doc));
    } else if (type == "sample") {
      record.samples.push_back({doc.at("t_ms").get<double>(),
                                doc.at("instances").get<std::size_t>(),
                                doc.at("rss_bytes").get<std::uint64_t>()});
    }
  }
  if (!have_header) {
    throw Error(ErrorCode::kInvalidArgument, "run record has no header line");
  }
  return record;
}

void save_run_record(const RunRecord& record, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  write_run_record(record, out);
  if (!out) throw Error(ErrorCode::kInternal, "cannot write " + path.string());
}

RunRecord load_run_record(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kNotFound, "cannot open " + path.string());
  return read_run_record(in);
}

}  // namespace fusebox::bench
