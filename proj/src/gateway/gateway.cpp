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

#include "fusebox/gateway/gateway.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "fusebox/core/error.hpp"
#include "fusebox/merger/wire.hpp"
#include "fusebox/runtime/archive.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace fusebox {
namespace {

void write_error(httplib::Response& res, int status, const std::string& what) {
  res.status = status;
  res.set_content(json{{"error", what}}.dump(), "application/json");
}

}  // namespace

std::uint64_t PlatformStats::rss_sum() const {
  std::uint64_t sum = 0;
  for (const auto& instance : instances) sum += instance.rss_bytes;
  return sum;
}

json to_json(const PlatformStats& stats) {
  json routes = json::object();
  for (const auto& [fn, ref] : stats.routes) {
    routes[fn.str()] = {{"instance", ref.id.str()},
                        {"address", ref.address.to_string()}};
  }
  json instances = json::array();
  for (const auto& instance : stats.instances) {
    json hosted = json::array();
    for (const auto& fn : instance.hosted) hosted.push_back(fn.str());
    instances.push_back({{"id", instance.id.str()},
                         {"address", instance.address.to_string()},
                         {"hosted", hosted},
                         {"state", std::string(to_string(instance.state))},
                         {"in_flight", instance.in_flight},
                         {"rss_bytes", instance.rss_bytes},
                         {"rss_died", instance.rss_died}});
  }
  json events = json::array();
  for (const auto& event : stats.merge_events) events.push_back(to_json(event));
  return {{"generation", stats.generation},
          {"fusion_enabled", stats.fusion_enabled},
          {"routes", routes},
          {"instances", instances},
          {"instance_count", stats.instances.size()},
          {"rss_sum_bytes", stats.rss_sum()},
          {"retired_instances", stats.retired_instances},
          {"merge_events", events}};
}

Gateway::Gateway(RuntimeManager& runtime, RoutingTable& routing, Merger* merger,
                 GatewayOptions options)
    : runtime_(runtime),
      routing_(routing),
      merger_(merger),
      options_(std::move(options)),
      server_(std::make_unique<httplib::Server>()) {
  auto threads = static_cast<std::size_t>(options_.server_threads);
  server_->new_task_queue = [threads] {
    return new httplib::ThreadPool(threads);
  };
  server_->set_payload_max_length(64 << 20);

  server_->Post(R"(/fn/([^/]+))", [this](const httplib::Request& req,
                                          httplib::Response& res) {
    auto result = route_request(req.matches[1], req.body,
                                req.get_header_value("Content-Type"));
    res.status = result.status;
    if (result.served_by) {
      res.set_header(kServedByIdHeader, result.served_by->id.str());
      res.set_header(kServedByAddressHeader,
                     result.served_by->address.to_string());
    }
    res.set_content(std::move(result.body), result.content_type);
  });

  server_->Put(R"(/admin/functions/([^/]+))", [this](const httplib::Request& req,
                                                      httplib::Response& res) {
    try {
      auto instance = deploy_function(FunctionId(req.matches[1]), req.body);
      res.status = 201;
      res.set_content(json{{"function", req.matches[1].str()},
                           {"instance", instance->id().str()},
                           {"address", instance->address().to_string()}}
                          .dump(),
                      "application/json");
    } catch (const Error& e) {
      write_error(res, http_status(e.code()), e.what());
    }
  });

  server_->Get("/admin/stats", [this](const httplib::Request&,
                                      httplib::Response& res) {
    res.set_content(to_json(stats()).dump(2), "application/json");
  });

  server_->Get("/health", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("ok", "text/plain");
  });
}

Gateway::~Gateway() { stop(); }

void Gateway::start() {
  if (options_.listen.port == 0) {
    options_.listen.port =
        static_cast<std::uint16_t>(server_->bind_to_any_port(options_.listen.host));
  } else if (!server_->bind_to_port(options_.listen.host, options_.listen.port)) {
    throw Error(ErrorCode::kConflict,
                "gateway cannot bind " + options_.listen.to_string());
  }
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

void Gateway::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

InvokeResult Gateway::route_request(const std::string& name,
                                    const std::string& body,
                                    const std::string& content_type) {
  if (!FunctionId::is_valid(name)) {
    return {404, json{{"error", "unknown function '" + name + "'"}}.dump(),
            "application/json", std::nullopt};
  }
  FunctionId fn(name);
  std::string last_error = "no attempt made";
  for (int attempt = 0; attempt < 2; ++attempt) {
    // One routing generation per attempt.
    auto snapshot = routing_.snapshot();
    const auto* target = snapshot->find(fn);
    if (!target) {
      return {404, json{{"error", "unknown function '" + name + "'"}}.dump(),
              "application/json", std::nullopt};
    }
    auto instance = runtime_.find(target->id);
    auto lease = instance ? instance->try_lease() : std::nullopt;
    if (!lease) {
      last_error = "instance " + target->id.str() + " is not accepting requests";
      continue;
    }

    httplib::Client client(target->address.host, target->address.port);
    client.set_connection_timeout(1, 0);
    auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
        options_.proxy_timeout);
    client.set_read_timeout(timeout.count() / 1'000'000,
                            timeout.count() % 1'000'000);
    client.set_write_timeout(timeout.count() / 1'000'000,
                             timeout.count() % 1'000'000);
    httplib::Headers headers{{kDispatchHeader, name}};
    auto result = client.Post(
        "/", headers, body,
        content_type.empty() ? "application/octet-stream" : content_type);
    if (result) {
      InvokeResult out;
      out.status = result->status;
      out.body = std::move(result->body);
      out.content_type = result->get_header_value("Content-Type");
      if (out.content_type.empty()) out.content_type = "application/octet-stream";
      out.served_by = *target;
      return out;
    }
    last_error = "instance " + target->id.str() + ": " +
                 httplib::to_string(result.error());
    // Only a refused connection proves the request never reached the
    // handler, so only that case is retried.
    if (result.error() != httplib::Error::Connection) break;
  }
  spdlog::warn("request for {} failed: {}", name, last_error);
  return {502, json{{"error", last_error}}.dump(), "application/json",
          std::nullopt};
}

InstancePtr Gateway::deploy_function(const FunctionId& name,
                                     std::string_view archive) {
  {
    std::lock_guard lock(admin_mutex_);
    if (routing_.snapshot()->find(name) || reserved_.contains(name)) {
      throw Error(ErrorCode::kConflict,
                  "function '" + name.str() + "' is already deployed");
    }
    reserved_.insert(name);
  }
  auto staging = runtime_.options().workdir / "uploads" /
                 (name.str() + "-" + std::to_string(++upload_counter_));
  try {
    fs::remove_all(staging);
    unpack_archive(archive, staging / name.str());
    auto instance = deploy_staged(name, staging);
    fs::remove_all(staging);
    return instance;
  } catch (...) {
    std::error_code ec;
    fs::remove_all(staging, ec);
    std::lock_guard lock(admin_mutex_);
    reserved_.erase(name);
    throw;
  }
}

InstancePtr Gateway::deploy_function_dir(const FunctionId& name,
                                         const fs::path& function_dir) {
  return deploy_function(name, pack_directory(function_dir));
}

InstancePtr Gateway::deploy_staged(const FunctionId& name,
                                   const fs::path& staging) {
  auto bundle = Bundle::create(staging, {name});
  auto instance = runtime_.deploy(InstanceSpec{bundle, 0, {}});
  runtime_.await_healthy(instance, options_.health_timeout);
  std::lock_guard lock(admin_mutex_);
  routing_.insert(name, instance->ref());
  reserved_.erase(name);
  spdlog::info("deployed function {} on {}", name.str(), instance->id().str());
  return instance;
}

PlatformStats Gateway::stats() const {
  PlatformStats stats;
  auto snapshot = routing_.snapshot();
  stats.generation = snapshot->generation;
  stats.routes = snapshot->entries;
  std::map<InstanceId, RssSample> rss;
  for (const auto& sample : runtime_.measure_rss()) rss[sample.id] = sample;
  for (const auto& instance : runtime_.live_instances()) {
    InstanceStats entry{instance->id(), instance->address(), instance->hosted(),
                        instance->state(), instance->in_flight()};
    if (auto it = rss.find(instance->id()); it != rss.end()) {
      entry.rss_bytes = it->second.bytes;
      entry.rss_died = it->second.died;
    }
    stats.instances.push_back(std::move(entry));
  }
  stats.retired_instances = runtime_.retired_instances().size();
  if (merger_) {
    stats.merge_events = merger_->events();
    stats.fusion_enabled = true;
  }
  return stats;
}

}  // namespace fusebox
