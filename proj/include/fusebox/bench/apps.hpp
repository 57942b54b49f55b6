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
#include <map>
#include <string>
#include <string_view>

#include "fusebox/core/call_graph.hpp"

namespace fusebox::bench {

enum class AppName { kTree, kIot };

std::string_view to_string(AppName app);
// Accepts "tree"/"iot" in any case. Throws Error(kInvalidArgument).
AppName parse_app_name(std::string_view text);

/// A benchmark application: its call graph, the entry function clients
/// invoke, and a per-function compute delay. Functions are rendered as
/// stub-handler scripts that perform the graph's calls in edge order.
struct WorkloadApp {
  AppName name;
  FunctionId entry;
  CallGraph graph;
  int compute_delay_ms = 10;
  std::map<FunctionId, int> compute_overrides;

  int compute_delay(const FunctionId& fn) const;
  std::string script_for(const FunctionId& fn) const;
  std::string payload(std::size_t index) const;

  // Writes `<dir>/<fn>/fn` for every function and returns the directories.
  std::map<FunctionId, std::filesystem::path> materialize(
      const std::filesystem::path& dir) const;
};

/// TREE: A -sync-> B, B -sync-> D, B -sync-> E, A -async-> C,
/// C -async-> F, C -async-> G.
///
/// IOT: AnalyzeSensor calls Temperature, AirQuality, Traffic and Combine
/// synchronously; Combine hands off to Store asynchronously.
WorkloadApp build_app(AppName name, int compute_delay_ms = 10);

}  // namespace fusebox::bench
