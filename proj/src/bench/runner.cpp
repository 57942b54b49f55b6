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

#include "fusebox/bench/runner.hpp"

#include <unistd.h>

#include <atomic>
#include <condition_variable>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include "fusebox/bench/load_generator.hpp"
#include "fusebox/core/clock.hpp"
#include "fusebox/core/error.hpp"
#include "fusebox/gateway/platform.hpp"
#include "fusebox/merger/wire.hpp"
#include "fusebox/runtime/archive.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace fusebox::bench {
namespace {

using Clock = std::chrono::steady_clock;

std::optional<json> fetch_stats(const Address& gateway) {
  httplib::Client client(gateway.host, gateway.port);
  client.set_connection_timeout(1, 0);
  client.set_read_timeout(5, 0);
  auto result = client.Get("/admin/stats");
  if (!result || result->status != 200) return std::nullopt;
  auto doc = json::parse(result->body, nullptr, false);
  if (doc.is_discarded()) return std::nullopt;
  return doc;
}

// Sleeps until `deadline` or until stop is requested; returns false on stop.
class StopSignal {
 public:
  void request() {
    {
      std::lock_guard lock(mutex_);
      stopped_ = true;
    }
    cv_.notify_all();
  }
  bool wait_until(Clock::time_point deadline) {
    std::unique_lock lock(mutex_);
    return !cv_.wait_until(lock, deadline, [&] { return stopped_; });
  }

 private:
  std::mutex mutex_;
  std::condition_variable cv_;
  bool stopped_ = false;
};

fs::path make_workdir(const fs::path& requested) {
  if (!requested.empty()) {
    fs::create_directories(requested);
    return requested;
  }
  auto dir = fs::temp_directory_path() /
             ("fusebox-bench-" + std::to_string(getpid()) + "-" +
              std::to_string(now_epoch_ms()));
  fs::create_directories(dir);
  return dir;
}

}  // namespace

std::optional<fs::path> default_handler_path() {
  std::error_code ec;
  auto self = fs::read_symlink("/proc/self/exe", ec);
  if (ec) return std::nullopt;
  for (auto dir : {self.parent_path(), self.parent_path().parent_path() / "tools"}) {
    auto candidate = dir / "fusebox-stub-handler";
    if (fs::exists(candidate)) return candidate;
  }
  return std::nullopt;
}

RunRecord run_benchmark(const RunOptions& options) {
  RunRecord record;
  record.params = {std::string(to_string(options.app)), options.mode,
                   options.requests, options.rate, options.hop_delay_ms,
                   options.compute_delay_ms};
  if (options.rate <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "rate must be positive");
  }

  auto app = build_app(options.app, options.compute_delay_ms);
  auto workdir = make_workdir(options.workdir);
  struct RemoveOnExit {
    fs::path path;
    ~RemoveOnExit() {
      std::error_code ec;
      if (!path.empty()) fs::remove_all(path, ec);
    }
  } cleanup{options.workdir.empty() ? workdir : fs::path()};

  std::unique_ptr<Platform> platform;
  Address gateway;
  std::optional<Address> merger;
  if (options.gateway) {
    gateway = *options.gateway;
    merger = options.merger;
  } else {
    PlatformConfig config;
    config.fusion = options.mode == Mode::kFusion;
    config.handler_detection = options.detector == Detector::kHandler;
    config.handler_command = options.handler_command;
    if (config.handler_command.empty()) {
      auto handler = default_handler_path();
      if (!handler) {
        throw Error(ErrorCode::kInvalidArgument,
                    "no handler command given and no stub handler found");
      }
      config.handler_command = {handler->string()};
    }
    config.workdir = workdir / "platform";
    config.merge_log = config.workdir / "merge-events.jsonl";
    config.hop_delay_ms = options.hop_delay_ms;
    config.health_timeout = options.health_timeout;
    config.drain_timeout = options.drain_timeout;
    platform = std::make_unique<Platform>(std::move(config));
    platform->start();
    gateway = platform->gateway_address();
    merger = platform->merger_address();
  }

  // Deploy through the admin API, exactly as a user would.
  auto sources = app.materialize(workdir / "functions");
  for (const auto& [fn, dir] : sources) {
    httplib::Client client(gateway.host, gateway.port);
    client.set_connection_timeout(2, 0);
    client.set_read_timeout(60, 0);
    auto result = client.Put("/admin/functions/" + fn.str(),
                             pack_directory(dir), "application/x-tar");
    if (!result || result->status != 201) {
      record.valid = false;
      record.invalid_reason =
          "deploy of " + fn.str() + " failed: " +
          (result ? std::to_string(result->status) + " " + result->body
                  : httplib::to_string(result.error()));
      spdlog::error("{}", record.invalid_reason);
      return record;
    }
  }

  record.started_at_ms = now_epoch_ms();
  const auto start = Clock::now();
  StopSignal stop;

  std::mutex samples_mutex;
  std::thread sampler([&] {
    auto next = start;
    do {
      if (auto stats = fetch_stats(gateway)) {
        ResourceSample sample;
        sample.t_ms =
            std::chrono::duration<double, std::milli>(Clock::now() - start).count();
        sample.instances = stats->at("instance_count").get<std::size_t>();
        sample.rss_bytes = stats->at("rss_sum_bytes").get<std::uint64_t>();
        std::lock_guard lock(samples_mutex);
        record.samples.push_back(sample);
      }
      next += options.sample_interval;
    } while (stop.wait_until(next));
  });

  std::thread detector;
  if (options.mode == Mode::kFusion && options.detector == Detector::kScripted) {
    if (!merger) {
      spdlog::warn("scripted detection needs a merger endpoint; skipping");
    } else {
      detector = std::thread([&, merger_address = *merger] {
        auto next = start + options.scripted_start;
        while (stop.wait_until(next)) {
          next += options.scripted_interval;
          auto stats = fetch_stats(gateway);
          if (!stats) continue;
          const auto& routes = stats->at("routes");
          httplib::Client client(merger_address.host, merger_address.port);
          client.set_connection_timeout(1, 0);
          for (const auto& edge : app.graph.edges()) {
            if (edge.mode != CallMode::kSync) continue;
            if (!routes.contains(edge.callee.str())) continue;
            FusionRequest request;
            request.caller = edge.caller;
            request.callee_address = Address::parse(
                routes[edge.callee.str()].at("address").get<std::string>());
            request.observed_at_ms = now_epoch_ms();
            client.Post("/merge", serialize_fusion_request(request),
                        "application/json");
          }
        }
      });
    }
  }

  const std::string path = "/fn/" + app.entry.str();
  record.requests = run_open_loop(
      options.requests, options.rate,
      [&](std::size_t index) -> Response {
        httplib::Client client(gateway.host, gateway.port);
        client.set_connection_timeout(2, 0);
        client.set_read_timeout(120, 0);
        auto result = client.Post(path, app.payload(index), "text/plain");
        if (!result) return {0, httplib::to_string(result.error())};
        return {result->status, result->body};
      },
      start);
  record.duration_ms =
      std::chrono::duration<double, std::milli>(Clock::now() - start).count();

  stop.request();
  sampler.join();
  if (detector.joinable()) detector.join();

  if (record.requests.size() < options.requests) {
    record.valid = false;
    record.invalid_reason = "platform unreachable after " +
                            std::to_string(record.requests.size()) + " requests";
  }
  if (auto stats = fetch_stats(gateway)) {
    for (const auto& event : stats->at("merge_events")) {
      record.merges.push_back(merge_event_from_json(event));
    }
  }
  if (platform) platform->stop();
  return record;
}

}  // namespace fusebox::bench
