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
#include <functional>
#include <string>
#include <vector>

#include "fusebox/bench/run_record.hpp"

namespace fusebox::bench {

struct Response {
  int status = 0;
  std::string body;
};

/// Open-loop constant-rate generator: request i is sent at start + i/rate
/// no matter how many earlier requests are still outstanding. `send` runs
/// on its own thread per request. Returning status 0 marks a transport
/// failure and stops further sends; the returned vector then holds only
/// the requests actually issued.
std::vector<RequestRecord> run_open_loop(
    std::size_t requests, double rate,
    const std::function<Response(std::size_t)>& send,
    std::chrono::steady_clock::time_point start);

}  // namespace fusebox::bench
