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

#include <condition_variable>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <thread>

#include "fusebox/core/fusion_request.hpp"
#include "fusebox/core/routing_table.hpp"
#include "fusebox/merger/merge_event.hpp"
#include "fusebox/runtime/runtime_manager.hpp"

namespace fusebox {

struct MergerOptions {
  Millis health_timeout = Millis(5000);
  Millis drain_timeout = Millis(10000);
  // Detections of one instance pair needed before a merge is queued.
  int fusion_threshold = 1;
  AddressSet internal = AddressSet::parse("127.0.0.0/8");
  std::filesystem::path staging_dir;
  std::filesystem::path event_log;
};

struct MergePlan {
  InstancePtr source_a;
  InstancePtr source_b;
  std::set<FunctionId> result_functions;
  std::int64_t created_at_ms = 0;
};

enum class AckStatus {
  kEnqueued,
  kCoalesced,
  kBelowThreshold,
  kDroppedExternal,
  kDroppedColocated,
  kDroppedUnknownCallee,
  kDroppedUnknownCaller,
};

std::string_view to_string(AckStatus status);

struct Ack {
  AckStatus status;
  std::string detail;
};

/// Runs the fusion pipeline. Detections are resolved against the live
/// registry, coalesced per instance pair and consumed by a single worker,
/// so at most one merge executes at any time.
class Merger {
 public:
  Merger(RuntimeManager& runtime, RoutingTable& routing, MergerOptions options);
  ~Merger();

  Merger(const Merger&) = delete;
  Merger& operator=(const Merger&) = delete;

  void start();
  void stop();

  // Thread-safe; never blocks on a running merge.
  Ack submit_fusion_request(const FusionRequest& request);

  // Validates and builds a plan. Throws Error(kFailedPrecondition) when the
  // sources are the same instance, not both Healthy, or share a function.
  MergePlan plan(const InstancePtr& a, const InstancePtr& b) const;

  // Synchronous pipeline: export, merge, deploy, health gate, reroute,
  // drain. Fails closed: on any abort, routing and sources are untouched.
  MergeEvent execute_merge(const MergePlan& plan);

  // Blocks until the queue is empty and no merge is running.
  void wait_idle();
  std::vector<MergeEvent> events() const { return log_.events(); }
  const MergerOptions& options() const noexcept { return options_; }

 private:
  struct PendingMerge {
    std::pair<InstanceId, InstanceId> key;
    FunctionId caller;
    std::set<FunctionId> callee_functions;
  };

  void run_worker();
  void process(const PendingMerge& pending);

  RuntimeManager& runtime_;
  RoutingTable& routing_;
  MergerOptions options_;
  MergeEventLog log_;

  std::mutex merge_mutex_;
  std::uint64_t merge_counter_ = 0;

  std::mutex queue_mutex_;
  std::condition_variable queue_cv_;
  std::deque<PendingMerge> queue_;
  std::set<std::pair<InstanceId, InstanceId>> pending_keys_;
  std::map<std::pair<InstanceId, InstanceId>, int> detections_;
  bool busy_ = false;
  bool stopping_ = false;
  std::thread worker_;
};

}  // namespace fusebox
