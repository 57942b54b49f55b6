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

#include <memory>
#include <optional>

#include "fusebox/gateway/config.hpp"
#include "fusebox/gateway/gateway.hpp"
#include "fusebox/merger/merger_service.hpp"

namespace fusebox {

/// One gateway, one runtime manager and, in fusion mode, a merger with its
/// HTTP service, wired together from a PlatformConfig.
class Platform {
 public:
  explicit Platform(PlatformConfig config);
  ~Platform();

  Platform(const Platform&) = delete;
  Platform& operator=(const Platform&) = delete;

  // Binds listeners and hands their addresses to the runtime manager.
  void start();
  void stop();

  Gateway& gateway() { return *gateway_; }
  RuntimeManager& runtime() { return *runtime_; }
  RoutingTable& routing() { return routing_; }
  Merger* merger() { return merger_.get(); }
  const PlatformConfig& config() const noexcept { return config_; }

  Address gateway_address() const { return gateway_->address(); }
  std::optional<Address> merger_address() const;

 private:
  PlatformConfig config_;
  RoutingTable routing_;
  std::unique_ptr<RuntimeManager> runtime_;
  std::unique_ptr<Merger> merger_;
  std::unique_ptr<MergerService> merger_service_;
  std::unique_ptr<Gateway> gateway_;
  bool started_ = false;
};

}  // namespace fusebox
