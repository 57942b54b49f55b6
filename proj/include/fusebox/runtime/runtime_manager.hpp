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
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <vector>

#include "fusebox/core/fusion_request.hpp"
#include "fusebox/runtime/bundle.hpp"
#include "fusebox/runtime/instance.hpp"
#include "fusebox/runtime/sandbox.hpp"

namespace fusebox {

using Millis = std::chrono::milliseconds;

struct InstanceSpec {
  Bundle bundle;
  // Port 0 picks a free ephemeral port.
  std::uint16_t listen_port = 0;
  std::map<std::string, std::string> env;
};

struct RuntimeOptions {
  std::filesystem::path workdir;
  std::shared_ptr<SandboxBackend> backend;
  std::string host = "127.0.0.1";
  std::string gateway_address;
  // Empty disables detection reporting in handlers.
  std::string merger_endpoint;
  AddressSet internal = AddressSet::parse("127.0.0.0/8");
  Millis health_poll = Millis(50);
  // Merged into every instance's environment; instance env wins.
  std::map<std::string, std::string> base_env;
};

struct RssSample {
  InstanceId id;
  std::uint64_t bytes = 0;
  bool died = false;
};

/// Owns the instance registry and drives sandbox lifecycles. Registry reads
/// run concurrently; mutations are serialized. Lifecycle calls block their
/// caller.
class RuntimeManager {
 public:
  explicit RuntimeManager(RuntimeOptions options);
  ~RuntimeManager();

  RuntimeManager(const RuntimeManager&) = delete;
  RuntimeManager& operator=(const RuntimeManager&) = delete;

  // Endpoints become known only after the gateway and merger bind.
  void set_endpoints(std::string gateway_address, std::string merger_endpoint);

  // Stages a private copy of the bundle, spawns the sandbox and registers the
  // instance as Starting. Throws Error(kInvalidArgument) for a bad bundle,
  // Error(kConflict) for a taken port, Error(kUnavailable) on spawn failure.
  // Nothing is registered when it throws.
  InstancePtr deploy(const InstanceSpec& spec);

  // Polls the health path until it succeeds. On timeout (or sandbox exit)
  // the instance is killed, marked Terminated, retired, and
  // Error(kTimeout) is thrown.
  void await_healthy(const InstancePtr& instance, Millis timeout);

  // Byte-identical copy of the instance's code tree at `destination`.
  // Throws Error(kFailedPrecondition) unless Healthy or Draining.
  Bundle export_bundle(const FunctionInstance& instance,
                       const std::filesystem::path& destination) const;

  // Stops new leases, waits for in-flight requests up to `drain_timeout`,
  // then kills the sandbox and retires the instance. Returns true when the
  // drain finished before the timeout.
  bool drain_and_terminate(const InstancePtr& instance, Millis drain_timeout);

  std::vector<RssSample> measure_rss() const;

  InstancePtr find(const InstanceId& id) const;
  InstancePtr at_address(const Address& address) const;
  // Non-terminated instances in creation order.
  std::vector<InstancePtr> live_instances() const;
  std::vector<LiveInstance> live_view() const;
  // Instances retired since startup, oldest first.
  std::vector<InstancePtr> retired_instances() const;

  const RuntimeOptions& options() const noexcept { return options_; }

  // Kills every live sandbox.
  void shutdown();

 private:
  void retire(const InstancePtr& instance);
  std::uint16_t reserve_port(std::uint16_t requested);
  bool probe_health(const Address& address) const;

  RuntimeOptions options_;
  mutable std::shared_mutex mutex_;
  std::vector<InstancePtr> live_;
  std::vector<InstancePtr> retired_;
  std::uint64_t next_id_ = 1;
};

}  // namespace fusebox
