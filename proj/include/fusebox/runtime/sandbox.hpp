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

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fusebox/core/types.hpp"

namespace fusebox {

/// Everything a backend needs to start one handler runtime. The positional
/// launch arguments are fixed: bundle root, listen port, gateway address,
/// merger endpoint, internal address set.
struct SandboxLaunch {
  std::filesystem::path bundle_root;
  std::filesystem::path workdir;
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;
  std::string gateway_address;
  std::string merger_endpoint;
  std::string internal_set;
  std::map<std::string, std::string> env;
};

class SandboxHandle {
 public:
  virtual ~SandboxHandle() = default;

  virtual int pid() const = 0;
  virtual bool alive() = 0;
  // Forced termination; returns once the sandbox is gone.
  virtual void kill() = 0;
  virtual std::optional<std::uint64_t> rss_bytes() const = 0;
};

class SandboxBackend {
 public:
  virtual ~SandboxBackend() = default;

  virtual std::string name() const = 0;
  // Throws Error(kUnavailable) when the sandbox cannot be started.
  virtual std::unique_ptr<SandboxHandle> spawn(const SandboxLaunch& launch) = 0;
};

/// One OS process per instance, started in its own process group with the
/// instance working directory as cwd and stdout/stderr appended to
/// `<workdir>/sandbox.log`.
class ProcessBackend final : public SandboxBackend {
 public:
  // `command` is the handler executable followed by any fixed leading
  // arguments (for example an interpreter and a script path).
  explicit ProcessBackend(std::vector<std::string> command);

  std::string name() const override { return "process"; }
  std::unique_ptr<SandboxHandle> spawn(const SandboxLaunch& launch) override;

 private:
  std::vector<std::string> command_;
};

std::optional<std::uint64_t> read_process_rss(int pid);

}  // namespace fusebox
