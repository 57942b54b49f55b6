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

#include "fusebox/runtime/runtime_manager.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "fusebox/core/error.hpp"

namespace fs = std::filesystem;

namespace fusebox {
namespace {

// Binds host:port to learn whether it is free (port 0 asks the kernel for
// an ephemeral one). Returns the bound port or 0.
std::uint16_t probe_bind(const std::string& host, std::uint16_t port) {
  int fd = socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) return 0;
  int one = 1;
  setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  }
  std::uint16_t bound = 0;
  if (bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0) {
    socklen_t len = sizeof addr;
    getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
    bound = ntohs(addr.sin_port);
  }
  close(fd);
  return bound;
}

}  // namespace

RuntimeManager::RuntimeManager(RuntimeOptions options)
    : options_(std::move(options)) {
  if (!options_.backend) {
    throw Error(ErrorCode::kInvalidArgument, "runtime manager needs a backend");
  }
  fs::create_directories(options_.workdir / "instances");
}

RuntimeManager::~RuntimeManager() { shutdown(); }

void RuntimeManager::set_endpoints(std::string gateway_address,
                                   std::string merger_endpoint) {
  std::unique_lock lock(mutex_);
  options_.gateway_address = std::move(gateway_address);
  options_.merger_endpoint = std::move(merger_endpoint);
}

std::uint16_t RuntimeManager::reserve_port(std::uint16_t requested) {
  auto taken = [&](std::uint16_t port) {
    return std::any_of(live_.begin(), live_.end(), [&](const auto& inst) {
      return inst->address().port == port;
    });
  };
  if (requested != 0) {
    Address address{options_.host, requested};
    if (taken(requested) || probe_bind(options_.host, requested) == 0) {
      throw Error(ErrorCode::kConflict,
                  "listen address " + address.to_string() + " is in use");
    }
    return requested;
  }
  for (int attempt = 0; attempt < 64; ++attempt) {
    auto port = probe_bind(options_.host, 0);
    if (port != 0 && !taken(port)) return port;
  }
  throw Error(ErrorCode::kUnavailable, "no free port for a new instance");
}

InstancePtr RuntimeManager::deploy(const InstanceSpec& spec) {
  validate_bundle_tree(spec.bundle.root(), spec.bundle.manifest());

  std::unique_lock lock(mutex_);
  char id_text[32];
  std::snprintf(id_text, sizeof id_text, "inst-%04llu",
                static_cast<unsigned long long>(next_id_++));
  InstanceId id(id_text);
  auto port = reserve_port(spec.listen_port);

  auto workdir = options_.workdir / "instances" / id.str();
  fs::remove_all(workdir);
  fs::create_directories(workdir);
  auto staged = spec.bundle.copy_to(workdir / "bundle");

  auto env = options_.base_env;
  for (const auto& [key, value] : spec.env) env[key] = value;
  env["FUSEBOX_INSTANCE_ID"] = id.str();
  env["FUSEBOX_INSTANCE_ADDRESS"] = options_.host + ":" + std::to_string(port);

  std::set<FunctionId> hosted(staged.manifest().begin(),
                              staged.manifest().end());
  auto instance = std::make_shared<FunctionInstance>(
      id, Address{options_.host, port}, std::move(hosted), workdir,
      staged.root(), spec.env);

  SandboxLaunch launch;
  launch.bundle_root = staged.root();
  launch.workdir = workdir;
  launch.host = options_.host;
  launch.port = port;
  launch.gateway_address = options_.gateway_address;
  launch.merger_endpoint = options_.merger_endpoint;
  launch.internal_set = options_.internal.to_string();
  launch.env = env;
  try {
    instance->sandbox_ = options_.backend->spawn(launch);
  } catch (...) {
    fs::remove_all(workdir);
    throw;
  }
  live_.push_back(instance);
  spdlog::debug("deployed {} on {} hosting {} function(s)", id.str(),
                instance->address().to_string(), instance->hosted().size());
  return instance;
}

bool RuntimeManager::probe_health(const Address& address) const {
  httplib::Client client(address.host, address.port);
  client.set_connection_timeout(0, 200'000);
  client.set_read_timeout(1, 0);
  auto result = client.Get("/health");
  return result && result->status == 200;
}

void RuntimeManager::await_healthy(const InstancePtr& instance,
                                   Millis timeout) {
  if (instance->state() != InstanceState::kStarting) {
    throw Error(ErrorCode::kFailedPrecondition,
                "instance " + instance->id().str() + " is not starting");
  }
  auto deadline = Clock::now() + timeout;
  while (Clock::now() < deadline) {
    if (!instance->sandbox_->alive()) break;
    if (probe_health(instance->address())) {
      instance->transition(InstanceState::kHealthy);
      return;
    }
    auto remaining = deadline - Clock::now();
    std::this_thread::sleep_for(
        std::min<Clock::duration>(options_.health_poll, remaining));
  }
  instance->sandbox_->kill();
  instance->transition(InstanceState::kTerminated);
  retire(instance);
  throw Error(ErrorCode::kTimeout, "instance " + instance->id().str() +
                                       " failed its health gate");
}

Bundle RuntimeManager::export_bundle(const FunctionInstance& instance,
                                     const fs::path& destination) const {
  auto state = instance.state();
  if (state != InstanceState::kHealthy && state != InstanceState::kDraining) {
    throw Error(ErrorCode::kFailedPrecondition,
                "cannot export instance " + instance.id().str() + " in state " +
                    std::string(to_string(state)));
  }
  return Bundle::open(instance.bundle_root()).copy_to(destination);
}

bool RuntimeManager::drain_and_terminate(const InstancePtr& instance,
                                         Millis drain_timeout) {
  auto state = instance->state();
  if (state == InstanceState::kHealthy) {
    instance->transition(InstanceState::kDraining);
  } else if (state != InstanceState::kDraining) {
    throw Error(ErrorCode::kFailedPrecondition,
                "cannot drain instance " + instance->id().str() +
                    " in state " + std::string(to_string(state)));
  }
  bool clean = instance->wait_drained(Clock::now() + drain_timeout);
  if (!clean) {
    spdlog::warn("instance {} still had {} request(s) in flight at drain "
                 "timeout; killing",
                 instance->id().str(), instance->in_flight());
  }
  instance->sandbox_->kill();
  instance->transition(InstanceState::kTerminated);
  retire(instance);
  return clean;
}

void RuntimeManager::retire(const InstancePtr& instance) {
  std::unique_lock lock(mutex_);
  auto it = std::find(live_.begin(), live_.end(), instance);
  if (it == live_.end()) return;
  live_.erase(it);
  retired_.push_back(instance);
}

std::vector<RssSample> RuntimeManager::measure_rss() const {
  std::vector<RssSample> samples;
  for (const auto& instance : live_instances()) {
    RssSample sample{instance->id(), 0, false};
    auto bytes = instance->sandbox_ && instance->sandbox_->alive()
                     ? instance->sandbox_->rss_bytes()
                     : std::nullopt;
    if (bytes) {
      sample.bytes = *bytes;
    } else {
      sample.died = true;
    }
    samples.push_back(sample);
  }
  return samples;
}

InstancePtr RuntimeManager::find(const InstanceId& id) const {
  std::shared_lock lock(mutex_);
  for (const auto& instance : live_) {
    if (instance->id() == id) return instance;
  }
  return nullptr;
}

InstancePtr RuntimeManager::at_address(const Address& address) const {
  std::shared_lock lock(mutex_);
  for (const auto& instance : live_) {
    if (instance->address() == address) return instance;
  }
  return nullptr;
}

std::vector<InstancePtr> RuntimeManager::live_instances() const {
  std::shared_lock lock(mutex_);
  return live_;
}

std::vector<LiveInstance> RuntimeManager::live_view() const {
  std::vector<LiveInstance> view;
  for (const auto& instance : live_instances()) {
    view.push_back({instance->id(), instance->address(), instance->hosted()});
  }
  return view;
}

std::vector<InstancePtr> RuntimeManager::retired_instances() const {
  std::shared_lock lock(mutex_);
  return retired_;
}

void RuntimeManager::shutdown() {
  for (const auto& instance : live_instances()) {
    if (instance->sandbox_) instance->sandbox_->kill();
    auto state = instance->state();
    if (state == InstanceState::kHealthy) {
      instance->transition(InstanceState::kDraining);
    }
    if (instance->state() != InstanceState::kTerminated) {
      instance->transition(InstanceState::kTerminated);
    }
    retire(instance);
  }
}

}  // namespace fusebox
