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

#include "fusebox/runtime/sandbox.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <mutex>

#include "fusebox/core/error.hpp"

extern char** environ;

namespace fusebox {
namespace {

class ProcessHandle final : public SandboxHandle {
 public:
  explicit ProcessHandle(pid_t pid) : pid_(pid) {}

  ~ProcessHandle() override { kill(); }

  int pid() const override { return pid_; }

  bool alive() override {
    std::lock_guard lock(mutex_);
    return poll_locked();
  }

  void kill() override {
    std::lock_guard lock(mutex_);
    if (!poll_locked()) return;
    ::kill(-pid_, SIGKILL);
    ::kill(pid_, SIGKILL);
    int status = 0;
    while (waitpid(pid_, &status, 0) < 0 && errno == EINTR) {
    }
    exited_ = true;
  }

  std::optional<std::uint64_t> rss_bytes() const override {
    {
      std::lock_guard lock(mutex_);
      if (exited_) return std::nullopt;
    }
    return read_process_rss(pid_);
  }

 private:
  bool poll_locked() {
    if (exited_) return false;
    int status = 0;
    pid_t rc = waitpid(pid_, &status, WNOHANG);
    if (rc == pid_ || (rc < 0 && errno == ECHILD)) exited_ = true;
    return !exited_;
  }

  const pid_t pid_;
  mutable std::mutex mutex_;
  bool exited_ = false;
};

}  // namespace

ProcessBackend::ProcessBackend(std::vector<std::string> command)
    : command_(std::move(command)) {
  if (command_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empty handler command");
  }
  // The child runs from its instance workdir; pin relative paths now.
  std::filesystem::path program(command_.front());
  if (program.is_relative() && command_.front().find('/') != std::string::npos) {
    command_.front() = std::filesystem::absolute(program).string();
  }
}

std::unique_ptr<SandboxHandle> ProcessBackend::spawn(
    const SandboxLaunch& launch) {
  std::vector<std::string> args = command_;
  args.push_back(launch.bundle_root.string());
  args.push_back(std::to_string(launch.port));
  args.push_back(launch.gateway_address);
  args.push_back(launch.merger_endpoint.empty() ? "-" : launch.merger_endpoint);
  args.push_back(launch.internal_set);

  std::map<std::string, std::string> env;
  for (char** entry = environ; entry && *entry; ++entry) {
    std::string_view kv(*entry);
    auto eq = kv.find('=');
    if (eq == std::string_view::npos) continue;
    env.emplace(std::string(kv.substr(0, eq)), std::string(kv.substr(eq + 1)));
  }
  for (const auto& [key, value] : launch.env) env[key] = value;
  env["FUSEBOX_LISTEN_HOST"] = launch.host;

  std::vector<std::string> env_strings;
  for (const auto& [key, value] : env) env_strings.push_back(key + "=" + value);
  std::vector<char*> argv;
  for (auto& arg : args) argv.push_back(arg.data());
  argv.push_back(nullptr);
  std::vector<char*> envp;
  for (auto& kv : env_strings) envp.push_back(kv.data());
  envp.push_back(nullptr);

  std::filesystem::create_directories(launch.workdir);
  auto log_path = (launch.workdir / "sandbox.log").string();
  auto workdir = launch.workdir.string();

  // The exec status pipe tells the parent whether execve succeeded.
  int status_pipe[2];
  if (pipe2(status_pipe, O_CLOEXEC) != 0) {
    throw Error(ErrorCode::kUnavailable,
                std::string("pipe: ") + std::strerror(errno));
  }

  pid_t pid = fork();
  if (pid < 0) {
    close(status_pipe[0]);
    close(status_pipe[1]);
    throw Error(ErrorCode::kUnavailable,
                std::string("fork: ") + std::strerror(errno));
  }
  if (pid == 0) {
    setpgid(0, 0);
    int log = open(log_path.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
    if (log >= 0) {
      dup2(log, STDOUT_FILENO);
      dup2(log, STDERR_FILENO);
      close(log);
    }
    int devnull = open("/dev/null", O_RDONLY);
    if (devnull >= 0) {
      dup2(devnull, STDIN_FILENO);
      close(devnull);
    }
    if (chdir(workdir.c_str()) != 0) {
      int err = errno;
      (void)!write(status_pipe[1], &err, sizeof err);
      _exit(127);
    }
    execve(argv[0], argv.data(), envp.data());
    int err = errno;
    (void)!write(status_pipe[1], &err, sizeof err);
    _exit(127);
  }

  close(status_pipe[1]);
  int child_errno = 0;
  ssize_t n;
  do {
    n = read(status_pipe[0], &child_errno, sizeof child_errno);
  } while (n < 0 && errno == EINTR);
  close(status_pipe[0]);
  if (n > 0) {
    int status = 0;
    waitpid(pid, &status, 0);
    throw Error(ErrorCode::kUnavailable, "cannot exec " + args.front() + ": " +
                                             std::strerror(child_errno));
  }
  setpgid(pid, pid);
  return std::make_unique<ProcessHandle>(pid);
}

std::optional<std::uint64_t> read_process_rss(int pid) {
  std::ifstream statm("/proc/" + std::to_string(pid) + "/statm");
  std::uint64_t size = 0;
  std::uint64_t resident = 0;
  if (!(statm >> size >> resident)) return std::nullopt;
  return resident * static_cast<std::uint64_t>(sysconf(_SC_PAGESIZE));
}

}  // namespace fusebox
