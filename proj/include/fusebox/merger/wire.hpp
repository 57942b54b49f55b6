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

#include <string>
#include <string_view>

#include <json.hpp>

#include "fusebox/core/fusion_request.hpp"
#include "fusebox/merger/merge_event.hpp"

namespace fusebox {

// Body of `POST /merge`:
//   {"caller": "A", "callee_ip": "127.0.0.1", "callee_port": 40123,
//    "observed_at_ms": 1700000000000, "caller_instance": "inst-0001"}
// `caller_instance` is optional. Throws Error(kInvalidArgument).
FusionRequest parse_fusion_request(std::string_view body);
std::string serialize_fusion_request(const FusionRequest& request);

nlohmann::json to_json(const MergeEvent& event);
MergeEvent merge_event_from_json(const nlohmann::json& json);

}  // namespace fusebox
