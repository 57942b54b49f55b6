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

#include "fusebox/gateway/platform.hpp"

#include <cstdlib>

#include "fusebox/core/error.hpp"

namespace fusebox {

Platform::Platform(PlatformConfig config) : config_(std::move(config)) {
  if (config_.sandbox_backend != "process") {
    throw Error(ErrorCode::kInvalidArgument,
                "unsupported sandbox backend '" + config_.sandbox_backend + "'");
  }
  if (config_.handler_command.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "handler_command is not set");
  }
  if (config_.workdir.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "workdir is not set");
  }

  RuntimeOptions runtime;
  runtime.workdir = config_.workdir;
  runtime.backend = std::make_shared<ProcessBackend>(config_.handler_command);
  runtime.host = config_.listen.host;
  runtime.internal = config_.internal;
  runtime.base_env["FUSEBOX_HOP_DELAY_MS"] = std::to_string(config_.hop_delay_ms);
  runtime_ = std::make_unique<RuntimeManager>(std::move(runtime));

  if (config_.fusion) {
    MergerOptions merger;
    merger.health_timeout = config_.health_timeout;
    merger.drain_timeout = config_.drain_timeout;
    merger.fusion_threshold = config_.fusion_threshold;
    merger.internal = config_.internal;
    merger.staging_dir = config_.workdir / "merges";
    merger.event_log = config_.merge_log;
    merger_ = std::make_unique<Merger>(*runtime_, routing_, std::move(merger));
    merger_service_ = std::make_unique<MergerService>(
        *merger_, config_.merger_listen.host, config_.merger_listen.port);
  }

  GatewayOptions gateway;
  gateway.listen = config_.listen;
  gateway.health_timeout = config_.health_timeout;
  gateway.proxy_timeout = config_.proxy_timeout;
  gateway_ = std::make_unique<Gateway>(*runtime_, routing_, merger_.get(),
                                       std::move(gateway));
}

Platform::~Platform() { stop(); }

void Platform::start() {
  if (started_) return;
  gateway_->start();
  std::string merger_endpoint;
  if (merger_) {
    merger_service_->start();
    merger_->start();
    if (config_.handler_detection) {
      merger_endpoint = merger_service_->address().to_string();
    }
  }
  runtime_->set_endpoints(gateway_->address().to_string(), merger_endpoint);
  started_ = true;
}

void Platform::stop() {
  if (!started_) return;
  started_ = false;
  if (merger_service_) merger_service_->stop();
  if (merger_) merger_->stop();
  gateway_->stop();
  runtime_->shutdown();
}

std::optional<Address> Platform::merger_address() const {
  if (!merger_service_) return std::nullopt;
  return merger_service_->address();
}

}  // namespace fusebox
