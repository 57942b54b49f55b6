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

// Minimal handler runtime speaking the sandbox spawn contract:
//
//   fusebox-stub-handler <bundle_root> <listen_port> <gateway_addr>
//                        <merger_endpoint|-> <internal_set>
//
// Each function's entry module `fn` is a small line-oriented script:
//
//   compute <ms>          sleep for <ms>
//   call <name> sync      invoke <name> and wait; its response is embedded
//   call <name> async     invoke <name> in the background
//   emit <text>           append literal text to the response
//   error [message]       fail the request with 500
//   hang                  never return
//   fail-load             refuse to load (the instance never turns healthy)
//   poison-when-fused     refuse to load when the bundle hosts >1 function
//
// The response of `f` for payload `p` is `f(p){part,part,...}` where parts
// are the responses of sync calls and emitted text, in script order. Calls
// to colocated functions run in-process; remote calls go through the
// gateway after FUSEBOX_HOP_DELAY_MS of injected delay. Blocking remote
// calls whose callee address is platform-internal are reported to the
// merger from a background thread.

#include <unistd.h>

#include <atomic>
#include <condition_variable>
#include <csignal>
#include <cstdlib>
#include <deque>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "fusebox/core/clock.hpp"
#include "fusebox/core/types.hpp"

namespace fs = std::filesystem;

namespace {

struct Step {
  enum class Kind { kCompute, kCallSync, kCallAsync, kEmit, kError, kHang };
  Kind kind;
  std::string arg;
  int millis = 0;
};

struct Script {
  std::vector<Step> steps;
};

struct LoadError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Script parse_script(const std::string& name, const fs::path& path,
                    std::size_t hosted_count) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot read " + path.string());
  Script script;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::istringstream words(line);
    std::string op;
    if (!(words >> op) || op.front() == '#') continue;
    auto where = name + ":" + std::to_string(number);
    if (op == "compute") {
      Step step{Step::Kind::kCompute, {}, 0};
      if (!(words >> step.millis)) throw LoadError(where + ": compute <ms>");
      script.steps.push_back(step);
    } else if (op == "call") {
      std::string target;
      std::string mode;
      if (!(words >> target >> mode) || (mode != "sync" && mode != "async")) {
        throw LoadError(where + ": call <name> sync|async");
      }
      script.steps.push_back({mode == "sync" ? Step::Kind::kCallSync
                                             : Step::Kind::kCallAsync,
                              target, 0});
    } else if (op == "emit") {
      std::string rest;
      std::getline(words >> std::ws, rest);
      script.steps.push_back({Step::Kind::kEmit, rest, 0});
    } else if (op == "error") {
      std::string rest;
      std::getline(words >> std::ws, rest);
      script.steps.push_back({Step::Kind::kError, rest, 0});
    } else if (op == "hang") {
      script.steps.push_back({Step::Kind::kHang, {}, 0});
    } else if (op == "fail-load") {
      throw LoadError(where + ": fail-load");
    } else if (op == "poison-when-fused") {
      if (hosted_count > 1) throw LoadError(where + ": poisoned when fused");
    } else {
      throw LoadError(where + ": unknown directive '" + op + "'");
    }
  }
  return script;
}

struct HandlerError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class Runtime {
 public:
  Runtime(fs::path bundle_root, fusebox::Address gateway, std::string merger,
          fusebox::AddressSet internal)
      : bundle_root_(std::move(bundle_root)),
        gateway_(std::move(gateway)),
        merger_(std::move(merger)),
        internal_(std::move(internal)) {
    if (const char* hop = std::getenv("FUSEBOX_HOP_DELAY_MS")) {
      hop_delay_ms_ = std::atoi(hop);
    }
    if (const char* id = std::getenv("FUSEBOX_INSTANCE_ID")) instance_id_ = id;
  }

  // All-or-nothing: the registry is only published when every entry module
  // parsed.
  void load() {
    std::ifstream manifest(bundle_root_ / "manifest");
    if (!manifest) throw LoadError("bundle has no manifest");
    std::vector<std::string> names;
    std::string line;
    while (std::getline(manifest, line)) {
      if (!line.empty()) names.push_back(line);
    }
    std::map<std::string, Script> loaded;
    for (const auto& name : names) {
      loaded.emplace(name, parse_script(name, bundle_root_ / name / "fn",
                                        names.size()));
    }
    registry_ = std::move(loaded);
    loaded_ = true;
  }

  bool loaded() const { return loaded_.load(); }
  bool hosts(const std::string& name) const { return registry_.contains(name); }

  std::string execute(const std::string& name, const std::string& payload) {
    const auto& script = registry_.at(name);
    std::string parts;
    auto add = [&](const std::string& part) {
      if (!parts.empty()) parts += ',';
      parts += part;
    };
    for (const auto& step : script.steps) {
      switch (step.kind) {
        case Step::Kind::kCompute:
          std::this_thread::sleep_for(std::chrono::milliseconds(step.millis));
          break;
        case Step::Kind::kCallSync:
          add(invoke(name, step.arg, payload, /*sync=*/true));
          break;
        case Step::Kind::kCallAsync:
          invoke(name, step.arg, payload, /*sync=*/false);
          break;
        case Step::Kind::kEmit:
          add(step.arg);
          break;
        case Step::Kind::kError:
          throw HandlerError(step.arg.empty() ? "error" : step.arg);
        case Step::Kind::kHang:
          while (true) std::this_thread::sleep_for(std::chrono::hours(1));
      }
    }
    return name + "(" + payload + "){" + parts + "}";
  }

  // SDK invoke: colocated -> direct call, otherwise through the gateway.
  std::string invoke(const std::string& caller, const std::string& callee,
                     const std::string& payload, bool sync) {
    if (hosts(callee)) {
      ++local_calls_;
      if (sync) return execute(callee, payload);
      std::thread([this, callee, payload] {
        try {
          execute(callee, payload);
        } catch (const std::exception& e) {
          std::cerr << "async local call to " << callee << ": " << e.what()
                    << std::endl;
        }
      }).detach();
      return {};
    }
    ++remote_calls_;
    if (!sync) {
      std::thread([this, callee, payload] {
        try {
          remote_call(callee, payload);
        } catch (const std::exception& e) {
          std::cerr << "async call to " << callee << ": " << e.what()
                    << std::endl;
        }
      }).detach();
      return {};
    }
    auto [body, served_by] = remote_call(callee, payload);
    if (served_by && internal_.contains(*served_by)) {
      report(caller, *served_by);
    }
    return body;
  }

  nlohmann::json counters() const {
    return {{"local_calls", local_calls_.load()},
            {"remote_calls", remote_calls_.load()},
            {"fusion_requests", fusion_requests_.load()}};
  }

  void run_monitor() {
    std::unique_lock lock(mutex_);
    while (true) {
      cv_.wait(lock, [&] { return !outbox_.empty(); });
      auto body = std::move(outbox_.front());
      outbox_.pop_front();
      lock.unlock();
      auto merger = fusebox::Address::parse(merger_);
      httplib::Client client(merger.host, merger.port);
      client.set_connection_timeout(0, 500'000);
      client.set_read_timeout(2, 0);
      client.Post("/merge", body, "application/json");  // best effort
      lock.lock();
    }
  }

 private:
  std::pair<std::string, std::optional<fusebox::Address>> remote_call(
      const std::string& callee, const std::string& payload) {
    if (hop_delay_ms_ > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(hop_delay_ms_));
    }
    httplib::Client client(gateway_.host, gateway_.port);
    client.set_connection_timeout(2, 0);
    client.set_read_timeout(120, 0);
    auto result = client.Post("/fn/" + callee, payload, "text/plain");
    if (!result) {
      throw HandlerError("call " + callee + ": " +
                         httplib::to_string(result.error()));
    }
    if (result->status != 200) {
      throw HandlerError("call " + callee + " returned " +
                         std::to_string(result->status));
    }
    std::optional<fusebox::Address> served_by;
    auto header = result->get_header_value("X-Instance-Address");
    if (!header.empty()) {
      try {
        served_by = fusebox::Address::parse(header);
      } catch (const std::exception&) {
      }
    }
    return {result->body, served_by};
  }

  void report(const std::string& caller, const fusebox::Address& callee) {
    if (merger_.empty() || merger_ == "-") return;
    nlohmann::json body{{"caller", caller},
                        {"callee_ip", callee.host},
                        {"callee_port", callee.port},
                        {"observed_at_ms", fusebox::now_epoch_ms()}};
    if (!instance_id_.empty()) body["caller_instance"] = instance_id_;
    ++fusion_requests_;
    {
      std::lock_guard lock(mutex_);
      outbox_.push_back(body.dump());
    }
    cv_.notify_one();
  }

  fs::path bundle_root_;
  fusebox::Address gateway_;
  std::string merger_;
  fusebox::AddressSet internal_;
  std::string instance_id_;
  int hop_delay_ms_ = 0;

  std::map<std::string, Script> registry_;
  std::atomic<bool> loaded_{false};
  std::atomic<long> local_calls_{0};
  std::atomic<long> remote_calls_{0};
  std::atomic<long> fusion_requests_{0};

  std::mutex mutex_;
  std::condition_variable cv_;
  std::deque<std::string> outbox_;
};

}  // namespace

int main(int argc, char** argv) {
  if (argc != 6) {
    std::cerr << "usage: " << argv[0]
              << " <bundle_root> <listen_port> <gateway_addr> "
                 "<merger_endpoint|-> <internal_set>\n";
    return 2;
  }
  std::signal(SIGPIPE, SIG_IGN);
  const int port = std::atoi(argv[2]);
  const char* host_env = std::getenv("FUSEBOX_LISTEN_HOST");
  std::string host = host_env ? host_env : "127.0.0.1";

  Runtime runtime(argv[1], fusebox::Address::parse(argv[3]), argv[4],
                  fusebox::AddressSet::parse(argv[5]));
  try {
    runtime.load();
  } catch (const std::exception& e) {
    // Keep serving so the health gate observes the failure.
    std::cerr << "load failed: " << e.what() << std::endl;
  }

  httplib::Server server;
  server.new_task_queue = [] { return new httplib::ThreadPool(32); };

  server.Get("/health", [&](const httplib::Request&, httplib::Response& res) {
    res.status = runtime.loaded() ? 200 : 503;
    res.set_content(runtime.loaded() ? "ok" : "loading failed", "text/plain");
  });
  server.Get("/stats", [&](const httplib::Request&, httplib::Response& res) {
    res.set_content(runtime.counters().dump(), "application/json");
  });
  server.Post("/", [&](const httplib::Request& req, httplib::Response& res) {
    auto name = req.get_header_value("X-Function-Name");
    if (name.empty()) {
      res.status = 400;
      res.set_content("missing X-Function-Name", "text/plain");
      return;
    }
    if (!runtime.loaded() || !runtime.hosts(name)) {
      res.status = 404;
      res.set_content("function " + name + " is not hosted here", "text/plain");
      return;
    }
    try {
      res.set_content(runtime.execute(name, req.body), "text/plain");
    } catch (const std::exception& e) {
      res.status = 500;
      res.set_content(name + ": " + e.what(), "text/plain");
    }
  });

  const pid_t parent = getppid();
  std::thread([parent] {
    // Exit with the platform if it goes away without killing us.
    while (getppid() == parent) std::this_thread::sleep_for(std::chrono::milliseconds(500));
    std::_Exit(0);
  }).detach();
  std::thread([&runtime] { runtime.run_monitor(); }).detach();

  if (!server.listen(host, port)) {
    std::cerr << "cannot listen on " << host << ":" << port << std::endl;
    return 1;
  }
  return 0;
}
