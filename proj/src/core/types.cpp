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

#include "fusebox/core/types.hpp"

#include <arpa/inet.h>

#include <algorithm>
#include <charconv>
#include <optional>
#include <sstream>

#include "fusebox/core/error.hpp"

namespace fusebox {
namespace {

std::optional<std::uint32_t> parse_ipv4(const std::string& text) {
  in_addr addr{};
  if (inet_pton(AF_INET, text.c_str(), &addr) != 1) return std::nullopt;
  return ntohl(addr.s_addr);
}

std::uint16_t parse_port(std::string_view text) {
  unsigned value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || value > 65535) {
    throw Error(ErrorCode::kInvalidArgument,
                "invalid port '" + std::string(text) + "'");
  }
  return static_cast<std::uint16_t>(value);
}

}  // namespace

FunctionId::FunctionId(std::string name) : name_(std::move(name)) {
  if (!is_valid(name_)) {
    throw Error(ErrorCode::kInvalidArgument,
                "invalid function name '" + name_ + "'");
  }
}

bool FunctionId::is_valid(std::string_view name) noexcept {
  if (name.empty()) return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
           (c >= '0' && c <= '9') || c == '_' || c == '-';
  });
}

std::ostream& operator<<(std::ostream& os, const FunctionId& id) {
  return os << id.str();
}

std::ostream& operator<<(std::ostream& os, const InstanceId& id) {
  return os << id.str();
}

Address Address::parse(std::string_view text) {
  auto colon = text.rfind(':');
  if (colon == std::string_view::npos || colon == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "address must be host:port, got '" + std::string(text) + "'");
  }
  return Address{std::string(text.substr(0, colon)),
                 parse_port(text.substr(colon + 1))};
}

std::string Address::to_string() const {
  return host + ":" + std::to_string(port);
}

std::ostream& operator<<(std::ostream& os, const Address& address) {
  return os << address.to_string();
}

AddressSet AddressSet::parse(std::string_view text) {
  AddressSet set;
  std::string token;
  for (char c : text) {
    if (c == ',' || c == ' ' || c == '\t' || c == '\n') {
      if (!token.empty()) set.add(token);
      token.clear();
    } else {
      token.push_back(c);
    }
  }
  if (!token.empty()) set.add(token);
  return set;
}

void AddressSet::add(std::string_view entry_text) {
  Entry entry;
  entry.text = std::string(entry_text);
  if (auto slash = entry_text.find('/'); slash != std::string_view::npos) {
    auto network = parse_ipv4(std::string(entry_text.substr(0, slash)));
    auto bits_text = entry_text.substr(slash + 1);
    unsigned bits = 0;
    auto [ptr, ec] = std::from_chars(bits_text.data(),
                                     bits_text.data() + bits_text.size(), bits);
    if (!network || ec != std::errc{} ||
        ptr != bits_text.data() + bits_text.size() || bits > 32) {
      throw Error(ErrorCode::kInvalidArgument,
                  "invalid CIDR '" + entry.text + "'");
    }
    entry.kind = Entry::Kind::kCidr;
    entry.mask = bits == 0 ? 0 : ~std::uint32_t{0} << (32 - bits);
    entry.network = *network & entry.mask;
  } else if (entry_text.find(':') != std::string_view::npos) {
    auto address = Address::parse(entry_text);
    entry.kind = Entry::Kind::kHostPort;
    entry.host = address.host;
    entry.port = address.port;
  } else if (!entry_text.empty()) {
    entry.kind = Entry::Kind::kHost;
    entry.host = std::string(entry_text);
  } else {
    throw Error(ErrorCode::kInvalidArgument, "empty address set entry");
  }
  entries_.push_back(std::move(entry));
}

bool AddressSet::contains(const Address& address) const {
  auto ip = parse_ipv4(address.host);
  for (const auto& entry : entries_) {
    switch (entry.kind) {
      case Entry::Kind::kCidr:
        if (ip && (*ip & entry.mask) == entry.network) return true;
        break;
      case Entry::Kind::kHost:
        if (entry.host == address.host) return true;
        break;
      case Entry::Kind::kHostPort:
        if (entry.host == address.host && entry.port == address.port)
          return true;
        break;
    }
  }
  return false;
}

std::string AddressSet::to_string() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (i) out << ',';
    out << entries_[i].text;
  }
  return out.str();
}

}  // namespace fusebox
