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

#include "fusebox/core/routing_table.hpp"

#include "fusebox/core/error.hpp"

namespace fusebox {

const InstanceRef* RoutingSnapshot::find(const FunctionId& id) const {
  auto it = entries.find(id);
  return it == entries.end() ? nullptr : &it->second;
}

RoutingSnapshot apply_reroute(const RoutingSnapshot& table,
                              const std::set<FunctionId>& functions,
                              const InstanceRef& target) {
  for (const auto& fn : functions) {
    if (!table.entries.contains(fn)) {
      throw Error(ErrorCode::kNotFound,
                  "cannot reroute unknown function '" + fn.str() + "'");
    }
  }
  RoutingSnapshot next = table;
  for (const auto& fn : functions) next.entries[fn] = target;
  next.generation = table.generation + 1;
  return next;
}

RoutingTable::RoutingTable()
    : current_(std::make_shared<const RoutingSnapshot>()) {}

std::shared_ptr<const RoutingSnapshot> RoutingTable::snapshot() const {
  std::lock_guard lock(pointer_);
  return current_;
}

void RoutingTable::publish(std::shared_ptr<const RoutingSnapshot> next) {
  std::lock_guard lock(pointer_);
  current_ = std::move(next);
}

std::uint64_t RoutingTable::insert(const FunctionId& function,
                                   const InstanceRef& target) {
  std::lock_guard lock(writer_);
  auto current = snapshot();
  if (current->entries.contains(function)) {
    throw Error(ErrorCode::kConflict,
                "function '" + function.str() + "' is already routed");
  }
  auto next = std::make_shared<RoutingSnapshot>(*current);
  next->entries.emplace(function, target);
  next->generation = current->generation + 1;
  auto generation = next->generation;
  publish(std::move(next));
  return generation;
}

std::uint64_t RoutingTable::reroute(const std::set<FunctionId>& functions,
                                    const InstanceRef& target) {
  std::lock_guard lock(writer_);
  auto next = std::make_shared<const RoutingSnapshot>(
      apply_reroute(*snapshot(), functions, target));
  auto generation = next->generation;
  publish(std::move(next));
  return generation;
}

bool RoutingTable::erase(const FunctionId& function) {
  std::lock_guard lock(writer_);
  auto current = snapshot();
  if (!current->entries.contains(function)) return false;
  auto next = std::make_shared<RoutingSnapshot>(*current);
  next->entries.erase(function);
  next->generation = current->generation + 1;
  publish(std::move(next));
  return true;
}

}  // namespace fusebox
