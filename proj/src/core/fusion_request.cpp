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

#include "fusebox/core/fusion_request.hpp"

namespace fusebox {

MergeDecision resolve_fusion_request(const FusionRequest& request,
                                     const RegistryView& registry) {
  auto callee = registry.by_address.find(request.callee_address);
  if (callee == registry.by_address.end() || callee->second.hosted.empty()) {
    return decision::UnknownCallee{};
  }
  // All functions hosted together route together, so any member identifies
  // where the callee side is served now.
  auto callee_route = registry.routes.find(*callee->second.hosted.begin());
  if (callee_route == registry.routes.end()) return decision::UnknownCallee{};

  auto caller_route = registry.routes.find(request.caller);
  if (caller_route == registry.routes.end()) return decision::UnknownCaller{};

  if (caller_route->second == callee_route->second) {
    return decision::AlreadyColocated{};
  }
  return decision::Merge{caller_route->second, callee_route->second};
}

RegistryView make_registry_view(const std::vector<LiveInstance>& instances,
                                const RoutingSnapshot& routes) {
  RegistryView view;
  for (const auto& instance : instances) {
    view.by_address.emplace(instance.address, instance);
  }
  for (const auto& [fn, ref] : routes.entries) view.routes.emplace(fn, ref.id);
  return view;
}

}  // namespace fusebox
