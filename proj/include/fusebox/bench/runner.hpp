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

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fusebox/bench/apps.hpp"
#include "fusebox/bench/run_record.hpp"
#include "fusebox/core/types.hpp"

namespace fusebox::bench {

enum class Detector {
  // Handlers report blocking internal calls themselves.
  kHandler,
  // The harness replays one fusion request per sync edge of the app graph.
  kScripted,
};

struct RunOptions {
  AppName app = AppName::kTree;
  Mode mode = Mode::kVanilla;
  std::size_t requests = 1000;
  double rate = 5.0;
  int hop_delay_ms = 0;
  int compute_delay_ms = 10;
  Detector detector = Detector::kHandler;

  // In-process platform settings.
  std::vector<std::string> handler_command;
  std::filesystem::path workdir;
  std::chrono::milliseconds health_timeout{5000};
  std::chrono::milliseconds drain_timeout{10000};

  // Use an already running platform instead of starting one.
  std::optional<Address> gateway;
  std::optional<Address> merger;

  std::chrono::milliseconds sample_interval{250};
  std::chrono::milliseconds scripted_start{1000};
  std::chrono::milliseconds scripted_interval{500};
};

/// Deploys the app, drives the workload and returns the full record. A
/// platform that cannot be reached yields a record with valid = false.
RunRecord run_benchmark(const RunOptions& options);

// Path of the stub handler shipped next to the running executable, if any.
std::optional<std::filesystem::path> default_handler_path();

}  // namespace fusebox::bench
