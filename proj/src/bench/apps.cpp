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

#include "fusebox/bench/apps.hpp"

#include <algorithm>
#include <fstream>

#include "fusebox/core/error.hpp"
#include "fusebox/runtime/bundle.hpp"

namespace fs = std::filesystem;

namespace fusebox::bench {

std::string_view to_string(AppName app) {
  return app == AppName::kTree ? "tree" : "iot";
}

AppName parse_app_name(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "tree") return AppName::kTree;
  if (lower == "iot") return AppName::kIot;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown app '" + std::string(text) + "'");
}

int WorkloadApp::compute_delay(const FunctionId& fn) const {
  auto it = compute_overrides.find(fn);
  return it == compute_overrides.end() ? compute_delay_ms : it->second;
}

std::string WorkloadApp::script_for(const FunctionId& fn) const {
  std::string script = "# " + fn.str() + "\n";
  script += "compute " + std::to_string(compute_delay(fn)) + "\n";
  for (const auto& edge : graph.outgoing(fn)) {
    script += "call " + edge.callee.str() + " " +
              std::string(fusebox::to_string(edge.mode)) + "\n";
  }
  return script;
}

std::string WorkloadApp::payload(std::size_t index) const {
  return "req-" + std::to_string(index);
}

std::map<FunctionId, fs::path> WorkloadApp::materialize(
    const fs::path& dir) const {
  std::map<FunctionId, fs::path> out;
  for (const auto& fn : graph.functions()) {
    auto fn_dir = dir / fn.str();
    fs::create_directories(fn_dir);
    std::ofstream(fn_dir / kEntryModule, std::ios::trunc) << script_for(fn);
    out.emplace(fn, fn_dir);
  }
  return out;
}

WorkloadApp build_app(AppName name, int compute_delay_ms) {
  WorkloadApp app;
  app.name = name;
  app.compute_delay_ms = compute_delay_ms;
  auto add = [&](std::initializer_list<const char*> names) {
    for (const char* n : names) app.graph.add_function(FunctionId(n));
  };
  auto edge = [&](const char* from, const char* to, CallMode mode) {
    app.graph.add_edge(FunctionId(from), FunctionId(to), mode);
  };
  switch (name) {
    case AppName::kTree:
      add({"A", "B", "C", "D", "E", "F", "G"});
      app.entry = FunctionId("A");
      edge("A", "B", CallMode::kSync);
      edge("A", "C", CallMode::kAsync);
      edge("B", "D", CallMode::kSync);
      edge("B", "E", CallMode::kSync);
      edge("C", "F", CallMode::kAsync);
      edge("C", "G", CallMode::kAsync);
      break;
    case AppName::kIot:
      add({"AnalyzeSensor", "Temperature", "AirQuality", "Traffic", "Combine",
           "Store"});
      app.entry = FunctionId("AnalyzeSensor");
      edge("AnalyzeSensor", "Temperature", CallMode::kSync);
      edge("AnalyzeSensor", "AirQuality", CallMode::kSync);
      edge("AnalyzeSensor", "Traffic", CallMode::kSync);
      edge("AnalyzeSensor", "Combine", CallMode::kSync);
      edge("Combine", "Store", CallMode::kAsync);
      break;
  }
  return app;
}

}  // namespace fusebox::bench
