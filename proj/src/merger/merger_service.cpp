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

#include "fusebox/merger/merger_service.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "fusebox/core/error.hpp"
#include "fusebox/merger/wire.hpp"

namespace fusebox {

MergerService::MergerService(Merger& merger, std::string host,
                             std::uint16_t port)
    : merger_(merger),
      host_(std::move(host)),
      port_(port),
      server_(std::make_unique<httplib::Server>()) {
  server_->new_task_queue = [] { return new httplib::ThreadPool(8); };

  server_->Post("/merge", [this](const httplib::Request& req,
                                 httplib::Response& res) {
    try {
      auto request = parse_fusion_request(req.body);
      auto ack = merger_.submit_fusion_request(request);
      nlohmann::json body{{"status", std::string(to_string(ack.status))}};
      if (!ack.detail.empty()) body["detail"] = ack.detail;
      res.status = ack.status == AckStatus::kEnqueued ? 202 : 200;
      res.set_content(body.dump(), "application/json");
    } catch (const Error& e) {
      res.status = http_status(e.code());
      res.set_content(nlohmann::json{{"error", e.what()}}.dump(),
                      "application/json");
    }
  });

  server_->Get("/events", [this](const httplib::Request&,
                                 httplib::Response& res) {
    std::string body;
    for (const auto& event : merger_.events()) {
      body += to_json(event).dump();
      body += '\n';
    }
    res.set_content(body, "application/x-ndjson");
  });

  server_->Get("/health", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("ok", "text/plain");
  });
}

MergerService::~MergerService() { stop(); }

void MergerService::start() {
  if (port_ == 0) {
    port_ = static_cast<std::uint16_t>(server_->bind_to_any_port(host_));
  } else if (!server_->bind_to_port(host_, port_)) {
    throw Error(ErrorCode::kConflict,
                "merger cannot bind " + address().to_string());
  }
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

void MergerService::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace fusebox
