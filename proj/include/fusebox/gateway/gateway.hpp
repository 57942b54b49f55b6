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

#include <atomic>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <thread>

#include <json.hpp>

#include "fusebox/core/routing_table.hpp"
#include "fusebox/merger/merger.hpp"
#include "fusebox/runtime/runtime_manager.hpp"

namespace httplib {
class Server;
}

namespace fusebox {

inline constexpr const char* kDispatchHeader = "X-Function-Name";
inline constexpr const char* kServedByIdHeader = "X-Instance-Id";
inline constexpr const char* kServedByAddressHeader = "X-Instance-Address";

struct GatewayOptions {
  Address listen{"127.0.0.1", 0};
  Millis health_timeout = Millis(5000);
  Millis proxy_timeout = Millis(60000);
  int server_threads = 64;
};

struct InvokeResult {
  int status = 200;
  std::string body;
  std::string content_type = "application/octet-stream";
  std::optional<InstanceRef> served_by;
};

struct InstanceStats {
  InstanceId id;
  Address address;
  std::set<FunctionId> hosted;
  InstanceState state;
  int in_flight = 0;
  std::uint64_t rss_bytes = 0;
  bool rss_died = false;
};

struct PlatformStats {
  std::uint64_t generation = 0;
  std::map<FunctionId, InstanceRef> routes;
  std::vector<InstanceStats> instances;
  std::size_t retired_instances = 0;
  std::vector<MergeEvent> merge_events;
  bool fusion_enabled = false;

  std::uint64_t rss_sum() const;
};

nlohmann::json to_json(const PlatformStats& stats);

/// Client-facing entry point. Routes `POST /fn/<name>` through the routing
/// table to the hosting instance and serves the admin API.
class Gateway {
 public:
  // `merger` may be null (vanilla mode).
  Gateway(RuntimeManager& runtime, RoutingTable& routing, Merger* merger,
          GatewayOptions options);
  ~Gateway();

  void start();
  void stop();
  Address address() const { return options_.listen; }

  // Unknown function -> 404. Unreachable target -> 502 after one retry
  // against a fresh routing snapshot.
  InvokeResult route_request(const std::string& name, const std::string& body,
                             const std::string& content_type = {});

  // `archive` is a ustar archive of the function directory. Throws
  // Error(kConflict) for a name in use; a failed health gate leaves nothing
  // registered.
  InstancePtr deploy_function(const FunctionId& name, std::string_view archive);
  InstancePtr deploy_function_dir(const FunctionId& name,
                                  const std::filesystem::path& function_dir);

  PlatformStats stats() const;

 private:
  InstancePtr deploy_staged(const FunctionId& name,
                            const std::filesystem::path& staging);

  RuntimeManager& runtime_;
  RoutingTable& routing_;
  Merger* merger_;
  GatewayOptions options_;

  std::mutex admin_mutex_;
  std::set<FunctionId> reserved_;
  std::atomic<std::uint64_t> upload_counter_{0};

  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
};

}  // namespace fusebox
