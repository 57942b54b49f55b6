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

#include "fusebox/merger/merger.hpp"

#include <future>

#include <spdlog/spdlog.h>

#include "fusebox/core/clock.hpp"
#include "fusebox/core/error.hpp"
#include "fusebox/merger/bundle_merge.hpp"

namespace fs = std::filesystem;

namespace fusebox {
namespace {

std::pair<InstanceId, InstanceId> pair_key(const InstanceId& a,
                                           const InstanceId& b) {
  return a < b ? std::pair{a, b} : std::pair{b, a};
}

// Union of the user environments; a key set to different values on the two
// sides is a conflict.
std::map<std::string, std::string> merge_env(const FunctionInstance& a,
                                             const FunctionInstance& b) {
  auto env = a.env();
  std::string conflicts;
  for (const auto& [key, value] : b.env()) {
    auto [it, inserted] = env.emplace(key, value);
    if (!inserted && it->second != value) {
      conflicts += (conflicts.empty() ? "" : ", ") + key;
    }
  }
  if (!conflicts.empty()) {
    throw Error(ErrorCode::kConflict,
                "environment keys conflict between sources: " + conflicts);
  }
  return env;
}

}  // namespace

std::string_view to_string(AckStatus status) {
  switch (status) {
    case AckStatus::kEnqueued: return "enqueued";
    case AckStatus::kCoalesced: return "coalesced";
    case AckStatus::kBelowThreshold: return "below_threshold";
    case AckStatus::kDroppedExternal: return "dropped_external";
    case AckStatus::kDroppedColocated: return "dropped_colocated";
    case AckStatus::kDroppedUnknownCallee: return "dropped_unknown_callee";
    case AckStatus::kDroppedUnknownCaller: return "dropped_unknown_caller";
  }
  return "?";
}

Merger::Merger(RuntimeManager& runtime, RoutingTable& routing,
               MergerOptions options)
    : runtime_(runtime),
      routing_(routing),
      options_(std::move(options)),
      log_(options_.event_log) {
  if (options_.staging_dir.empty()) {
    options_.staging_dir = runtime_.options().workdir / "merges";
  }
  if (options_.fusion_threshold < 1) options_.fusion_threshold = 1;
  fs::create_directories(options_.staging_dir);
}

Merger::~Merger() { stop(); }

void Merger::start() {
  std::lock_guard lock(queue_mutex_);
  if (worker_.joinable()) return;
  stopping_ = false;
  worker_ = std::thread([this] { run_worker(); });
}

void Merger::stop() {
  {
    std::lock_guard lock(queue_mutex_);
    stopping_ = true;
  }
  queue_cv_.notify_all();
  if (worker_.joinable()) worker_.join();
}

Ack Merger::submit_fusion_request(const FusionRequest& request) {
  if (!options_.internal.contains(request.callee_address)) {
    return {AckStatus::kDroppedExternal,
            request.callee_address.to_string() + " is not platform-internal"};
  }
  auto view = make_registry_view(runtime_.live_view(), *routing_.snapshot());
  auto decision = resolve_fusion_request(request, view);

  if (std::holds_alternative<decision::AlreadyColocated>(decision)) {
    return {AckStatus::kDroppedColocated, {}};
  }
  if (std::holds_alternative<decision::UnknownCallee>(decision)) {
    return {AckStatus::kDroppedUnknownCallee,
            "no live instance at " + request.callee_address.to_string()};
  }
  if (std::holds_alternative<decision::UnknownCaller>(decision)) {
    return {AckStatus::kDroppedUnknownCaller,
            "'" + request.caller.str() + "' is not routed"};
  }

  const auto& merge = std::get<decision::Merge>(decision);
  auto key = pair_key(merge.caller_instance, merge.callee_instance);
  PendingMerge pending{key, request.caller,
                       view.by_address.at(request.callee_address).hosted};
  {
    std::lock_guard lock(queue_mutex_);
    if (pending_keys_.contains(key)) return {AckStatus::kCoalesced, {}};
    if (++detections_[key] < options_.fusion_threshold) {
      return {AckStatus::kBelowThreshold, {}};
    }
    detections_.erase(key);
    pending_keys_.insert(key);
    queue_.push_back(std::move(pending));
  }
  queue_cv_.notify_all();
  return {AckStatus::kEnqueued,
          merge.caller_instance.str() + "+" + merge.callee_instance.str()};
}

void Merger::wait_idle() {
  std::unique_lock lock(queue_mutex_);
  queue_cv_.wait(lock, [&] { return (queue_.empty() && !busy_) || stopping_; });
}

void Merger::run_worker() {
  std::unique_lock lock(queue_mutex_);
  while (true) {
    queue_cv_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
    if (stopping_) break;
    auto pending = std::move(queue_.front());
    queue_.pop_front();
    busy_ = true;
    lock.unlock();
    try {
      process(pending);
    } catch (const std::exception& e) {
      spdlog::error("merge worker: {}", e.what());
    }
    lock.lock();
    pending_keys_.erase(pending.key);
    busy_ = false;
    queue_cv_.notify_all();
  }
  busy_ = false;
  queue_cv_.notify_all();
}

void Merger::process(const PendingMerge& pending) {
  // Re-resolve by function: either source may have been merged away since
  // the request was queued.
  auto routes = routing_.snapshot();
  const auto* caller = routes->find(pending.caller);
  const auto* callee = routes->find(*pending.callee_functions.begin());
  if (!caller || !callee) {
    spdlog::info("dropping queued merge: functions no longer routed");
    return;
  }
  if (caller->id == callee->id) return;
  auto a = runtime_.find(caller->id);
  auto b = runtime_.find(callee->id);
  if (!a || !b) {
    spdlog::info("dropping queued merge: source instance gone");
    return;
  }
  MergePlan merge_plan;
  try {
    merge_plan = plan(a, b);
  } catch (const Error& e) {
    spdlog::info("dropping queued merge: {}", e.what());
    return;
  }
  execute_merge(merge_plan);
}

MergePlan Merger::plan(const InstancePtr& a, const InstancePtr& b) const {
  if (!a || !b || a == b || a->id() == b->id()) {
    throw Error(ErrorCode::kFailedPrecondition,
                "a merge needs two distinct instances");
  }
  if (a->state() != InstanceState::kHealthy ||
      b->state() != InstanceState::kHealthy) {
    throw Error(ErrorCode::kFailedPrecondition,
                "merge sources must both be Healthy");
  }
  MergePlan result{a, b, a->hosted(), now_epoch_ms()};
  for (const auto& fn : b->hosted()) {
    if (!result.result_functions.insert(fn).second) {
      throw Error(ErrorCode::kFailedPrecondition,
                  "function '" + fn.str() + "' is hosted by both sources");
    }
  }
  return result;
}

MergeEvent Merger::execute_merge(const MergePlan& plan) {
  std::lock_guard serial(merge_mutex_);
  const auto& a = plan.source_a;
  const auto& b = plan.source_b;

  MergeEvent event;
  event.source_a = a->id();
  event.source_b = b->id();
  event.functions_a = a->hosted();
  event.functions_b = b->hosted();
  event.created_at_ms = plan.created_at_ms;

  auto finish = [&](MergeOutcome outcome, std::string detail) {
    event.outcome = outcome;
    event.detail = std::move(detail);
    event.completed_at_ms = std::max(now_epoch_ms(), event.created_at_ms);
    event.routing_generation = routing_.snapshot()->generation;
    log_.append(event);
    if (outcome == MergeOutcome::kCompleted) {
      spdlog::info("merged {} + {} into {} ({} functions)", a->id().str(),
                   b->id().str(), event.new_instance->str(),
                   plan.result_functions.size());
    } else {
      spdlog::warn("merge {} + {} aborted: {} {}", a->id().str(),
                   b->id().str(), to_string(outcome), event.detail);
    }
    return event;
  };

  if (a->state() != InstanceState::kHealthy ||
      b->state() != InstanceState::kHealthy) {
    return finish(MergeOutcome::kAbortedStale, "source no longer Healthy");
  }

  auto staging = options_.staging_dir / ("merge-" + std::to_string(++merge_counter_));
  fs::remove_all(staging);
  struct Cleanup {
    fs::path path;
    ~Cleanup() {
      std::error_code ec;
      fs::remove_all(path, ec);
    }
  } cleanup{staging};

  InstancePtr fused;
  try {
    auto exported_a = runtime_.export_bundle(*a, staging / "a");
    auto exported_b = runtime_.export_bundle(*b, staging / "b");
    auto merged = merge_bundles(exported_a, exported_b, staging / "merged");
    auto env = merge_env(*a, *b);
    fused = runtime_.deploy(InstanceSpec{merged, 0, std::move(env)});
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kFailedPrecondition) {
      return finish(MergeOutcome::kAbortedStale, e.what());
    }
    return finish(MergeOutcome::kAbortedDeployFailure, e.what());
  }
  event.new_instance = fused->id();

  try {
    runtime_.await_healthy(fused, options_.health_timeout);
  } catch (const Error& e) {
    return finish(MergeOutcome::kAbortedHealthFailure, e.what());
  }

  try {
    routing_.reroute(plan.result_functions, fused->ref());
  } catch (const Error& e) {
    runtime_.drain_and_terminate(fused, Millis(0));
    return finish(MergeOutcome::kAbortedStale, e.what());
  }

  auto drain_a = std::async(std::launch::async, [&] {
    return runtime_.drain_and_terminate(a, options_.drain_timeout);
  });
  bool clean_b = runtime_.drain_and_terminate(b, options_.drain_timeout);
  bool clean_a = drain_a.get();
  return finish(MergeOutcome::kCompleted,
                clean_a && clean_b ? "" : "drain timed out; forced kill");
}

}  // namespace fusebox
