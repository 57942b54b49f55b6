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

#include "fusebox/bench/load_generator.hpp"

#include <atomic>
#include <thread>

namespace fusebox::bench {

std::vector<RequestRecord> run_open_loop(
    std::size_t requests, double rate,
    const std::function<Response(std::size_t)>& send,
    std::chrono::steady_clock::time_point start) {
  using namespace std::chrono;
  std::vector<RequestRecord> records(requests);
  std::vector<std::thread> workers;
  workers.reserve(requests);
  std::atomic<bool> aborted{false};
  std::size_t issued = 0;

  const auto interval = duration<double>(1.0 / rate);
  for (std::size_t i = 0; i < requests && !aborted.load(); ++i) {
    auto due = start + duration_cast<steady_clock::duration>(interval * i);
    std::this_thread::sleep_until(due);
    if (aborted.load()) break;
    ++issued;
    workers.emplace_back([&, i] {
      auto sent = steady_clock::now();
      auto response = send(i);
      auto done = steady_clock::now();
      auto& record = records[i];
      record.index = i;
      record.sent_ms = duration<double, std::milli>(sent - start).count();
      record.latency_ms = duration<double, std::milli>(done - sent).count();
      record.status = response.status;
      record.body = std::move(response.body);
      if (response.status == 0) aborted = true;
    });
  }
  for (auto& worker : workers) worker.join();
  records.resize(issued);
  return records;
}

}  // namespace fusebox::bench
