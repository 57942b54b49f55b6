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
#include <string>
#include <string_view>
#include <vector>

#include "fusebox/core/types.hpp"

namespace fusebox {

/// Platform configuration. On disk it is a `key = value` file; blank lines
/// and lines starting with `#` are ignored:
///
///   listen            = 127.0.0.1:8080
///   merger_listen     = 127.0.0.1:8081
///   internal          = 127.0.0.0/8
///   health_timeout_ms = 5000
///   drain_timeout_ms  = 10000
///   fusion            = on
///   fusion_threshold  = 1
///   handler_detection = on
///   sandbox_backend   = process
///   handler_command   = /usr/local/bin/fusebox-stub-handler
///   workdir           = /var/lib/fusebox
///   merge_log         = /var/lib/fusebox/merge-events.jsonl
///   hop_delay_ms      = 0
///   proxy_timeout_ms  = 60000
struct PlatformConfig {
  Address listen{"127.0.0.1", 0};
  Address merger_listen{"127.0.0.1", 0};
  AddressSet internal = AddressSet::parse("127.0.0.0/8");
  std::chrono::milliseconds health_timeout{5000};
  std::chrono::milliseconds drain_timeout{10000};
  bool fusion = true;
  int fusion_threshold = 1;
  // When off, handlers are launched without a merger endpoint and merges
  // only happen through requests submitted directly to the merger.
  bool handler_detection = true;
  std::string sandbox_backend = "process";
  std::vector<std::string> handler_command;
  std::filesystem::path workdir;
  std::filesystem::path merge_log;
  int hop_delay_ms = 0;
  std::chrono::milliseconds proxy_timeout{60000};
};

// Throws Error(kInvalidArgument) on unknown keys or malformed values.
PlatformConfig parse_config(std::string_view text);
PlatformConfig load_config(const std::filesystem::path& path);

}  // namespace fusebox
