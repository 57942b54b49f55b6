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

#include "fusebox/core/call_graph.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "fusebox/core/error.hpp"

namespace fusebox {

std::string_view to_string(CallMode mode) {
  return mode == CallMode::kSync ? "sync" : "async";
}

void CallGraph::add_function(const FunctionId& id) { functions_.insert(id); }

void CallGraph::add_edge(const CallEdge& edge) {
  if (edge.caller == edge.callee) {
    throw Error(ErrorCode::kInvalidArgument,
                "self call on '" + edge.caller.str() + "'");
  }
  if (!contains(edge.caller) || !contains(edge.callee)) {
    throw Error(ErrorCode::kInvalidArgument,
                "edge " + edge.caller.str() + "->" + edge.callee.str() +
                    " references an unknown function");
  }
  if (std::find(edges_.begin(), edges_.end(), edge) != edges_.end()) {
    throw Error(ErrorCode::kInvalidArgument,
                "duplicate edge " + edge.caller.str() + "->" +
                    edge.callee.str());
  }
  edges_.push_back(edge);
}

bool CallGraph::remove_edge(const CallEdge& edge) {
  auto it = std::find(edges_.begin(), edges_.end(), edge);
  if (it == edges_.end()) return false;
  edges_.erase(it);
  return true;
}

std::vector<CallEdge> CallGraph::outgoing(const FunctionId& caller) const {
  std::vector<CallEdge> out;
  for (const auto& edge : edges_) {
    if (edge.caller == caller) out.push_back(edge);
  }
  return out;
}

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

}  // namespace

std::vector<FusionGroup> compute_fusion_groups(const CallGraph& graph) {
  const auto& functions = graph.functions();
  std::vector<FunctionId> ordered(functions.begin(), functions.end());
  std::map<FunctionId, std::size_t> index;
  for (std::size_t i = 0; i < ordered.size(); ++i) index[ordered[i]] = i;

  DisjointSets sets(ordered.size());
  for (const auto& edge : graph.edges()) {
    if (edge.mode != CallMode::kSync) continue;
    sets.unite(index.at(edge.caller), index.at(edge.callee));
  }

  // Walking `ordered` (sorted) means each group is first seen at its
  // smallest member, which fixes the output order.
  std::map<std::size_t, std::size_t> slot;
  std::vector<FusionGroup> groups;
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    auto root = sets.find(i);
    auto [it, inserted] = slot.try_emplace(root, groups.size());
    if (inserted) groups.emplace_back();
    groups[it->second].insert(ordered[i]);
  }
  return groups;
}

}  // namespace fusebox
