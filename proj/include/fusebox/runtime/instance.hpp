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
#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <vector>

#include "fusebox/core/routing_table.hpp"
#include "fusebox/core/types.hpp"
#include "fusebox/runtime/sandbox.hpp"

namespace fusebox {

enum class InstanceState { kStarting, kHealthy, kDraining, kTerminated };

std::string_view to_string(InstanceState state);

// Starting->Healthy->Draining->Terminated, plus Starting->Terminated.
bool is_legal_transition(InstanceState from, InstanceState to);

using Clock = std::chrono::steady_clock;

struct StateChange {
  InstanceState state;
  Clock::time_point at;
};

class FunctionInstance;

/// Counts one in-flight request against an instance for as long as it lives.
class RequestLease {
 public:
  RequestLease(RequestLease&& other) noexcept;
  RequestLease& operator=(RequestLease&&) = delete;
  RequestLease(const RequestLease&) = delete;
  ~RequestLease();

 private:
  friend class FunctionInstance;
  explicit RequestLease(std::shared_ptr<FunctionInstance> instance)
      : instance_(std::move(instance)) {}

  std::shared_ptr<FunctionInstance> instance_;
};

class FunctionInstance : public std::enable_shared_from_this<FunctionInstance> {
 public:
  FunctionInstance(InstanceId id, Address address, std::set<FunctionId> hosted,
                   std::filesystem::path workdir,
                   std::filesystem::path bundle_root,
                   std::map<std::string, std::string> env);

  const InstanceId& id() const noexcept { return id_; }
  const Address& address() const noexcept { return address_; }
  const std::set<FunctionId>& hosted() const noexcept { return hosted_; }
  const std::filesystem::path& workdir() const noexcept { return workdir_; }
  const std::filesystem::path& bundle_root() const noexcept {
    return bundle_root_;
  }
  // User-supplied environment; platform-injected variables are not part of it.
  const std::map<std::string, std::string>& env() const noexcept {
    return env_;
  }
  Clock::time_point started_at() const noexcept { return started_at_; }
  InstanceRef ref() const { return InstanceRef{id_, address_}; }

  InstanceState state() const;
  std::vector<StateChange> history() const;
  int in_flight() const;
  int pid() const;

  // Succeeds only while the instance is Healthy; the gateway treats a
  // refused lease like an unreachable target and re-reads the routes.
  std::optional<RequestLease> try_lease();

 private:
  friend class RuntimeManager;
  friend class RequestLease;

  // Throws Error(kFailedPrecondition) on an illegal transition.
  void transition(InstanceState to);
  void release();
  // Blocks until no request is in flight or the deadline passes. On return
  // no new lease can be granted. Returns true if the drain was clean.
  bool wait_drained(Clock::time_point deadline);

  const InstanceId id_;
  const Address address_;
  const std::set<FunctionId> hosted_;
  const std::filesystem::path workdir_;
  const std::filesystem::path bundle_root_;
  const std::map<std::string, std::string> env_;
  const Clock::time_point started_at_;

  mutable std::mutex mutex_;
  std::condition_variable drained_;
  std::vector<StateChange> history_;
  int in_flight_ = 0;
  std::unique_ptr<SandboxHandle> sandbox_;
};

using InstancePtr = std::shared_ptr<FunctionInstance>;

}  // namespace fusebox
