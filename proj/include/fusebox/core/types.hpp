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

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace fusebox {

/// Name of a deployed function. Restricted to `[a-zA-Z0-9_-]+` so it can be
/// used verbatim as a URL path segment and as a directory name in bundles.
class FunctionId {
 public:
  FunctionId() = default;
  // Throws Error(kInvalidArgument) on an empty or out-of-alphabet name.
  explicit FunctionId(std::string name);

  static bool is_valid(std::string_view name) noexcept;

  const std::string& str() const noexcept { return name_; }

  auto operator<=>(const FunctionId&) const = default;

 private:
  std::string name_;
};

std::ostream& operator<<(std::ostream& os, const FunctionId& id);

/// Opaque identifier of a sandbox instance.
class InstanceId {
 public:
  InstanceId() = default;
  explicit InstanceId(std::string value) : value_(std::move(value)) {}

  const std::string& str() const noexcept { return value_; }
  bool empty() const noexcept { return value_.empty(); }

  auto operator<=>(const InstanceId&) const = default;

 private:
  std::string value_;
};

std::ostream& operator<<(std::ostream& os, const InstanceId& id);

struct Address {
  std::string host;
  std::uint16_t port = 0;

  // Accepts "host:port". Throws Error(kInvalidArgument).
  static Address parse(std::string_view text);
  std::string to_string() const;

  auto operator<=>(const Address&) const = default;
};

std::ostream& operator<<(std::ostream& os, const Address& address);

/// The platform-internal address set. Entries are IPv4 CIDR blocks
/// ("10.0.0.0/8"), bare hosts ("127.0.0.1", "localhost") matching any port,
/// or explicit "host:port" pairs.
class AddressSet {
 public:
  AddressSet() = default;

  // Comma- or whitespace-separated list of entries.
  static AddressSet parse(std::string_view text);

  void add(std::string_view entry);
  bool contains(const Address& address) const;
  bool empty() const noexcept { return entries_.empty(); }

  // Comma-separated form; parse(to_string()) round-trips.
  std::string to_string() const;

 private:
  struct Entry {
    std::string text;
    enum class Kind { kCidr, kHost, kHostPort } kind;
    std::uint32_t network = 0;
    std::uint32_t mask = 0;
    std::string host;
    std::uint16_t port = 0;
  };
  std::vector<Entry> entries_;
};

}  // namespace fusebox

template <>
struct std::hash<fusebox::FunctionId> {
  std::size_t operator()(const fusebox::FunctionId& id) const noexcept {
    return std::hash<std::string>{}(id.str());
  }
};

template <>
struct std::hash<fusebox::InstanceId> {
  std::size_t operator()(const fusebox::InstanceId& id) const noexcept {
    return std::hash<std::string>{}(id.str());
  }
};
