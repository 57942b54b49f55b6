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
#include <memory>
#include <mutex>
#include <set>

#include "fusebox/core/types.hpp"

namespace fusebox {

struct InstanceRef {
  InstanceId id;
  Address address;

  auto operator<=>(const InstanceRef&) const = default;
};

struct RoutingSnapshot {
  std::map<FunctionId, InstanceRef> entries;
  std::uint64_t generation = 0;

  const InstanceRef* find(const FunctionId& id) const;
};

/// Pure form of a reroute: every id in `functions` maps to `target`, all
/// other entries are kept and the generation is bumped by one. Throws
/// Error(kNotFound) when a function has no entry; `table` is untouched.
RoutingSnapshot apply_reroute(const RoutingSnapshot& table,
                              const std::set<FunctionId>& functions,
                              const InstanceRef& target);

/// Generation-counted routing state shared by the gateway (readers) and the
/// admin/merge paths (single writer). Readers always get an immutable
/// snapshot, so a multi-entry reroute is observed all-or-nothing.
class RoutingTable {
 public:
  RoutingTable();

  std::shared_ptr<const RoutingSnapshot> snapshot() const;

  // Adds a new entry. Throws Error(kConflict) if `function` already routes.
  std::uint64_t insert(const FunctionId& function, const InstanceRef& target);

  // Throws Error(kNotFound) on unknown ids; the table stays unchanged.
  std::uint64_t reroute(const std::set<FunctionId>& functions,
                        const InstanceRef& target);

  // Removes the entry; returns false if it did not exist. Bumps the
  // generation only when something was removed.
  bool erase(const FunctionId& function);

 private:
  void publish(std::shared_ptr<const RoutingSnapshot> next);

  std::mutex writer_;
  mutable std::mutex pointer_;
  std::shared_ptr<const RoutingSnapshot> current_;
};

}  // namespace fusebox
