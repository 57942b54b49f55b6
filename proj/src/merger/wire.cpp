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

#include "fusebox/merger/wire.hpp"

#include "fusebox/core/error.hpp"

using nlohmann::json;

namespace fusebox {
namespace {

json names(const std::set<FunctionId>& ids) {
  json out = json::array();
  for (const auto& id : ids) out.push_back(id.str());
  return out;
}

std::set<FunctionId> parse_names(const json& array) {
  std::set<FunctionId> out;
  for (const auto& item : array) out.emplace(item.get<std::string>());
  return out;
}

}  // namespace

FusionRequest parse_fusion_request(std::string_view body) {
  json doc = json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw Error(ErrorCode::kInvalidArgument,
                "fusion request body is not a JSON object");
  }
  auto require = [&](const char* key) -> const json& {
    auto it = doc.find(key);
    if (it == doc.end()) {
      throw Error(ErrorCode::kInvalidArgument,
                  std::string("fusion request lacks '") + key + "'");
    }
    return *it;
  };
  const auto& caller = require("caller");
  const auto& ip = require("callee_ip");
  const auto& port = require("callee_port");
  if (!caller.is_string() || !ip.is_string() || ip.get<std::string>().empty() ||
      !port.is_number_integer()) {
    throw Error(ErrorCode::kInvalidArgument, "fusion request has bad field types");
  }
  auto port_value = port.get<std::int64_t>();
  if (port_value <= 0 || port_value > 65535) {
    throw Error(ErrorCode::kInvalidArgument, "callee_port out of range");
  }

  FusionRequest request;
  request.caller = FunctionId(caller.get<std::string>());
  request.callee_address = {ip.get<std::string>(),
                            static_cast<std::uint16_t>(port_value)};
  if (auto it = doc.find("observed_at_ms"); it != doc.end()) {
    if (!it->is_number_integer()) {
      throw Error(ErrorCode::kInvalidArgument, "observed_at_ms must be an integer");
    }
    request.observed_at_ms = it->get<std::int64_t>();
  }
  if (auto it = doc.find("caller_instance"); it != doc.end() && it->is_string()) {
    request.caller_instance = InstanceId(it->get<std::string>());
  }
  return request;
}

std::string serialize_fusion_request(const FusionRequest& request) {
  json doc{{"caller", request.caller.str()},
           {"callee_ip", request.callee_address.host},
           {"callee_port", request.callee_address.port},
           {"observed_at_ms", request.observed_at_ms}};
  if (request.caller_instance) {
    doc["caller_instance"] = request.caller_instance->str();
  }
  return doc.dump();
}

json to_json(const MergeEvent& event) {
  json doc{{"source_a", event.source_a.str()},
           {"source_b", event.source_b.str()},
           {"functions_a", names(event.functions_a)},
           {"functions_b", names(event.functions_b)},
           {"new_instance", event.new_instance ? json(event.new_instance->str())
                                               : json(nullptr)},
           {"outcome", std::string(to_string(event.outcome))},
           {"created_at_ms", event.created_at_ms},
           {"completed_at_ms", event.completed_at_ms},
           {"routing_generation", event.routing_generation}};
  if (!event.detail.empty()) doc["detail"] = event.detail;
  return doc;
}

MergeEvent merge_event_from_json(const json& doc) {
  MergeEvent event;
  event.source_a = InstanceId(doc.at("source_a").get<std::string>());
  event.source_b = InstanceId(doc.at("source_b").get<std::string>());
  event.functions_a = parse_names(doc.at("functions_a"));
  event.functions_b = parse_names(doc.at("functions_b"));
  if (const auto& inst = doc.at("new_instance"); !inst.is_null()) {
    event.new_instance = InstanceId(inst.get<std::string>());
  }
  event.outcome = merge_outcome_from_string(doc.at("outcome").get<std::string>());
  event.created_at_ms = doc.at("created_at_ms").get<std::int64_t>();
  event.completed_at_ms = doc.at("completed_at_ms").get<std::int64_t>();
  event.routing_generation = doc.value("routing_generation", std::uint64_t{0});
  event.detail = doc.value("detail", std::string{});
  return event;
}

}  // namespace fusebox
