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

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <variant>

#include "fusebox/core/routing_table.hpp"
#include "fusebox/core/types.hpp"

namespace fusebox {

/// Detection event emitted by a handler that saw one of its functions block
/// on a call into the platform.
struct FusionRequest {
  FunctionId caller;
  // Instance that hosted the caller when the call was observed. Informational;
  // resolution goes through the routing table because the caller may have
  // been merged since.
  std::optional<InstanceId> caller_instance;
  Address callee_address;
  std::int64_t observed_at_ms = 0;
};

struct LiveInstance {
  InstanceId id;
  Address address;
  std::set<FunctionId> hosted;
};

/// Read-only view of the registry taken at one point in time: every
/// non-terminated instance keyed by its listen address, plus the routing
/// entries that say which instance currently serves each function.
struct RegistryView {
  std::map<Address, LiveInstance> by_address;
  std::map<FunctionId, InstanceId> routes;
};

namespace decision {
struct Merge {
  InstanceId caller_instance;
  InstanceId callee_instance;
};
struct AlreadyColocated {};
struct UnknownCallee {};
struct UnknownCaller {};
}  // namespace decision

using MergeDecision =
    std::variant<decision::Merge, decision::AlreadyColocated,
                 decision::UnknownCallee, decision::UnknownCaller>;

/// Maps a detection onto the pair of live instances to merge. The callee
/// side is the instance currently serving the functions hosted at
/// `callee_address`, so detections that race a merge still land on the
/// surviving instance.
MergeDecision resolve_fusion_request(const FusionRequest& request,
                                     const RegistryView& registry);

RegistryView make_registry_view(const std::vector<LiveInstance>& instances,
                                const RoutingSnapshot& routes);

}  // namespace fusebox
