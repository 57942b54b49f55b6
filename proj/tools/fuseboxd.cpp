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

// Platform daemon: gateway, runtime manager and (in fusion mode) merger.

#include <csignal>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "fusebox/core/error.hpp"
#include "fusebox/gateway/platform.hpp"

namespace {
volatile std::sig_atomic_t g_stop = 0;
void on_signal(int) { g_stop = 1; }
}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"fusebox platform daemon"};
  std::string config_path;
  std::string log_level = "info";
  cli.add_option("-c,--config", config_path, "platform config file")->required();
  cli.add_option("--log-level", log_level, "trace|debug|info|warn|error");
  CLI11_PARSE(cli, argc, argv);

  spdlog::set_level(spdlog::level::from_str(log_level));
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::signal(SIGPIPE, SIG_IGN);

  try {
    fusebox::Platform platform(fusebox::load_config(config_path));
    platform.start();
    spdlog::info("gateway listening on {}",
                 platform.gateway_address().to_string());
    if (auto merger = platform.merger_address()) {
      spdlog::info("merger listening on {}", merger->to_string());
    } else {
      spdlog::info("fusion disabled");
    }
    while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(200));
    spdlog::info("shutting down");
    platform.stop();
  } catch (const fusebox::Error& e) {
    std::cerr << "fuseboxd: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
