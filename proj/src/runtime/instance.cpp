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

#include "fusebox/runtime/instance.hpp"

#include "fusebox/core/error.hpp"

namespace fusebox {

std::string_view to_string(InstanceState state) {
  switch (state) {
    case InstanceState::kStarting: return "Starting";
    case InstanceState::kHealthy: return "Healthy";
    case InstanceState::kDraining: return "Draining";
    case InstanceState::kTerminated: return "Terminated";
  }
  return "?";
}

bool is_legal_transition(InstanceState from, InstanceState to) {
  switch (from) {
    case InstanceState::kStarting:
      return to == InstanceState::kHealthy || to == InstanceState::kTerminated;
    case InstanceState::kHealthy:
      return to == InstanceState::kDraining;
    case InstanceState::kDraining:
      return to == InstanceState::kTerminated;
    case InstanceState::kTerminated:
      return false;
  }
  return false;
}

RequestLease::RequestLease(RequestLease&& other) noexcept
    : instance_(std::move(other.instance_)) {}

RequestLease::~RequestLease() {
  if (instance_) instance_->release();
}

FunctionInstance::FunctionInstance(InstanceId id, Address address,
                                   std::set<FunctionId> hosted,
                                   std::filesystem::path workdir,
                                   std::filesystem::path bundle_root,
                                   std::map<std::string, std::string> env)
    : id_(std::move(id)),
      address_(std::move(address)),
      hosted_(std::move(hosted)),
      workdir_(std::move(workdir)),
      bundle_root_(std::move(bundle_root)),
      env_(std::move(env)),
      started_at_(Clock::now()),
      history_{{InstanceState::kStarting, started_at_}} {}

InstanceState FunctionInstance::state() const {
  std::lock_guard lock(mutex_);
  return history_.back().state;
}

std::vector<StateChange> FunctionInstance::history() const {
  std::lock_guard lock(mutex_);
  return history_;
}

int FunctionInstance::in_flight() const {
  std::lock_guard lock(mutex_);
  return in_flight_;
}

int FunctionInstance::pid() const {
  std::lock_guard lock(mutex_);
  return sandbox_ ? sandbox_->pid() : -1;
}

std::optional<RequestLease> FunctionInstance::try_lease() {
  std::lock_guard lock(mutex_);
  if (history_.back().state != InstanceState::kHealthy) return std::nullopt;
  ++in_flight_;
  return RequestLease(shared_from_this());
}

void FunctionInstance::release() {
  std::lock_guard lock(mutex_);
  if (--in_flight_ == 0) drained_.notify_all();
}

void FunctionInstance::transition(InstanceState to) {
  std::lock_guard lock(mutex_);
  auto from = history_.back().state;
  if (!is_legal_transition(from, to)) {
    throw Error(ErrorCode::kFailedPrecondition,
                "instance " + id_.str() + ": illegal transition " +
                    std::string(to_string(from)) + " -> " +
                    std::string(to_string(to)));
  }
  history_.push_back({to, Clock::now()});
}

bool FunctionInstance::wait_drained(Clock::time_point deadline) {
  std::unique_lock lock(mutex_);
  return drained_.wait_until(lock, deadline, [&] { return in_flight_ == 0; });
}

}  // namespace fusebox
