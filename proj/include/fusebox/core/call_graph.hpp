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

#include <set>
#include <vector>

#include "fusebox/core/types.hpp"

namespace fusebox {

enum class CallMode { kSync, kAsync };

std::string_view to_string(CallMode mode);

struct CallEdge {
  FunctionId caller;
  FunctionId callee;
  CallMode mode = CallMode::kSync;

  auto operator<=>(const CallEdge&) const = default;
};

/// Named functions plus the sync/async invocation edges between them.
/// Edges keep insertion order so workload generators can replay calls in a
/// stable sequence; duplicates are rejected.
class CallGraph {
 public:
  // Adding an existing function is a no-op.
  void add_function(const FunctionId& id);

  // Throws Error(kInvalidArgument) on self-loops, unknown endpoints, or a
  // duplicate (caller, callee, mode) triple.
  void add_edge(const CallEdge& edge);
  void add_edge(const FunctionId& caller, const FunctionId& callee,
                CallMode mode) {
    add_edge(CallEdge{caller, callee, mode});
  }

  // Returns false if the edge was not present.
  bool remove_edge(const CallEdge& edge);

  bool contains(const FunctionId& id) const { return functions_.contains(id); }

  const std::set<FunctionId>& functions() const noexcept { return functions_; }
  const std::vector<CallEdge>& edges() const noexcept { return edges_; }

  // Edges issued by `caller`, in insertion order.
  std::vector<CallEdge> outgoing(const FunctionId& caller) const;

 private:
  std::set<FunctionId> functions_;
  std::vector<CallEdge> edges_;
};

using FusionGroup = std::set<FunctionId>;

/// Connected components of the undirected graph formed by the sync edges.
/// Async edges never influence the result. Groups come back sorted by their
/// smallest member.
std::vector<FusionGroup> compute_fusion_groups(const CallGraph& graph);

}  // namespace fusebox
