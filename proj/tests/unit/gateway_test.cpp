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

#include <gtest/gtest.h>

#include <future>

#include <json.hpp>

#include "fusebox/core/error.hpp"
#include "fusebox/gateway/config.hpp"
#include "fusebox/gateway/platform.hpp"
#include "fusebox/merger/merge_event.hpp"
#include "fusebox/runtime/archive.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using namespace std::chrono_literals;

namespace fusebox {
namespace {

using testing::TempDir;
using testing::write_file;

TEST(ConfigTest, ParsesAllKeys) {
  auto config = parse_config(R"(
# comment
listen = 127.0.0.1:8080
merger_listen = 127.0.0.1:8081
internal = 10.0.0.0/8 127.0.0.0/8
health_timeout_ms = 1500
drain_timeout_ms = 2500
proxy_timeout_ms = 3000
fusion = off
fusion_threshold = 3
handler_detection = no
sandbox_backend = process
handler_command = /bin/handler --flag
workdir = /tmp/wd
hop_delay_ms = 50
)");
  EXPECT_EQ(config.listen, (Address{"127.0.0.1", 8080}));
  EXPECT_EQ(config.merger_listen.port, 8081);
  EXPECT_TRUE(config.internal.contains({"10.1.1.1", 1}));
  EXPECT_EQ(config.health_timeout, 1500ms);
  EXPECT_EQ(config.drain_timeout, 2500ms);
  EXPECT_EQ(config.proxy_timeout, 3000ms);
  EXPECT_FALSE(config.fusion);
  EXPECT_EQ(config.fusion_threshold, 3);
  EXPECT_FALSE(config.handler_detection);
  EXPECT_EQ(config.handler_command,
            (std::vector<std::string>{"/bin/handler", "--flag"}));
  EXPECT_EQ(config.merge_log, fs::path("/tmp/wd/merge-events.jsonl"));
  EXPECT_EQ(config.hop_delay_ms, 50);
}

TEST(ConfigTest, RejectsBadInput) {
  EXPECT_THROW(parse_config("bogus = 1\n"), Error);
  EXPECT_THROW(parse_config("listen\n"), Error);
  EXPECT_THROW(parse_config("drain_timeout_ms = -4\n"), Error);
  EXPECT_THROW(parse_config("fusion = maybe\n"), Error);
  EXPECT_THROW(parse_config("fusion_threshold = 0\n"), Error);
  EXPECT_THROW(load_config("/nonexistent/fusebox.conf"), Error);
}

TEST(ConfigTest, DefaultsAreUsable) {
  auto config = parse_config("");
  EXPECT_TRUE(config.fusion);
  EXPECT_EQ(config.fusion_threshold, 1);
  EXPECT_TRUE(config.internal.contains({"127.0.0.1", 1}));
}

const std::vector<std::pair<const char*, const char*>> kTree{
    {"A", "call B sync\ncall C async\n"},
    {"B", "call D sync\ncall E sync\n"},
    {"C", "call F async\ncall G async\n"},
    {"D", "emit d\n"},
    {"E", "emit e\n"},
    {"F", "emit f\n"},
    {"G", "emit g\n"},
};
const char* kTreeResponse = "A(p){B(p){D(p){d},E(p){e}}}";

class PlatformTest : public ::testing::Test {
 protected:
  void start(bool fusion, bool detection) {
    platform_ = std::make_unique<Platform>(
        testing::platform_config(dir_ / "work", fusion, detection));
    platform_->start();
  }

  void deploy_tree() {
    for (const auto& [name, script] : kTree) deploy(name, script);
  }

  InstancePtr deploy(const std::string& name, const std::string& script) {
    auto fn_dir = dir_ / "fns" / name;
    write_file(fn_dir / "fn", script);
    return platform_->gateway().deploy_function_dir(FunctionId(name), fn_dir);
  }

  testing::HttpResult invoke(const std::string& fn, const std::string& body) {
    return testing::post(platform_->gateway_address(), "/fn/" + fn, body);
  }

  TempDir dir_;
  std::unique_ptr<Platform> platform_;
};

TEST_F(PlatformTest, FreshPlatformStatsAreEmpty) {
  start(true, true);
  auto stats = platform_->gateway().stats();
  EXPECT_TRUE(stats.instances.empty());
  EXPECT_TRUE(stats.routes.empty());
  EXPECT_TRUE(stats.merge_events.empty());
  EXPECT_EQ(stats.rss_sum(), 0u);

  httplib::Client client(platform_->gateway_address().host,
                         platform_->gateway_address().port);
  auto res = client.Get("/admin/stats");
  ASSERT_TRUE(res);
  auto doc = nlohmann::json::parse(res->body);
  EXPECT_EQ(doc["instance_count"], 0);
  EXPECT_EQ(doc["rss_sum_bytes"], 0);
  EXPECT_TRUE(doc["fusion_enabled"].get<bool>());
}

TEST_F(PlatformTest, EachFunctionGetsItsOwnInstance) {
  start(false, false);
  deploy_tree();
  auto stats = platform_->gateway().stats();
  EXPECT_EQ(stats.instances.size(), 7u);
  EXPECT_EQ(stats.routes.size(), 7u);
  std::set<InstanceId> ids;
  for (const auto& [fn, ref] : stats.routes) ids.insert(ref.id);
  EXPECT_EQ(ids.size(), 7u);
  EXPECT_GT(stats.rss_sum(), 0u);
  EXPECT_FALSE(stats.fusion_enabled);

  auto r = invoke("A", "p");
  EXPECT_EQ(r.status, 200);
  EXPECT_EQ(r.body, kTreeResponse);
  // Vanilla mode never merges.
  for (int i = 0; i < 5; ++i) invoke("A", "p");
  EXPECT_EQ(platform_->gateway().stats().instances.size(), 7u);
}

TEST_F(PlatformTest, UnknownFunctionIs404) {
  start(false, false);
  EXPECT_EQ(invoke("Nope", "x").status, 404);
  EXPECT_EQ(invoke("bad%20name", "x").status, 404);
  EXPECT_EQ(platform_->gateway().route_request("Nope", "x").status, 404);
}

TEST_F(PlatformTest, DuplicateDeployIsRejected) {
  start(false, false);
  deploy("A", "emit a\n");
  try {
    deploy("A", "emit other\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConflict);
  }
  EXPECT_EQ(invoke("A", "x").body, "A(x){a}");
}

TEST_F(PlatformTest, FailedHealthGateRegistersNothing) {
  auto config = testing::platform_config(dir_ / "work", false, false);
  config.health_timeout = 1000ms;
  platform_ = std::make_unique<Platform>(config);
  platform_->start();
  EXPECT_THROW(deploy("A", "fail-load\n"), Error);
  auto stats = platform_->gateway().stats();
  EXPECT_TRUE(stats.routes.empty());
  EXPECT_TRUE(stats.instances.empty());
  // The name is free again.
  deploy("A", "emit a\n");
  EXPECT_EQ(invoke("A", "x").status, 200);
}

TEST_F(PlatformTest, HttpDeployWithArchive) {
  start(false, false);
  write_file(dir_ / "up" / "fn", "emit uploaded\n");
  write_file(dir_ / "up" / "data" / "blob", "payload");
  auto archive = pack_directory(dir_ / "up");
  httplib::Client client(platform_->gateway_address().host,
                         platform_->gateway_address().port);
  auto res = client.Put("/admin/functions/Up", archive, "application/x-tar");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 201);
  auto doc = nlohmann::json::parse(res->body);
  EXPECT_EQ(doc["function"], "Up");
  auto inst = platform_->runtime().find(InstanceId(doc["instance"]));
  ASSERT_TRUE(inst);
  EXPECT_EQ(testing::read_file(inst->bundle_root() / "Up" / "data" / "blob"),
            "payload");
  EXPECT_EQ(invoke("Up", "x").body, "Up(x){uploaded}");

  res = client.Put("/admin/functions/Up", archive, "application/x-tar");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 409);
  res = client.Put("/admin/functions/Bad", "not a tar", "application/x-tar");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);

  // curl --data-binary defaults to a form content type.
  write_file(dir_ / "big" / "fn", "emit big\n");
  write_file(dir_ / "big" / "blob", std::string(200'000, 'z'));
  res = client.Put("/admin/functions/Big", pack_directory(dir_ / "big"),
                   "application/x-www-form-urlencoded");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 201);
  EXPECT_EQ(invoke("Big", "x").body, "Big(x){big}");
}

TEST_F(PlatformTest, ResponsesIdenticalAcrossConvergence) {
  start(true, true);
  deploy_tree();
  ASSERT_EQ(invoke("A", "p").body, kTreeResponse);
  // Handler-side detection reports each blocking internal call.
  ASSERT_TRUE(testing::eventually(
      [&] {
        auto r = invoke("A", "p");
        EXPECT_EQ(r.status, 200);
        EXPECT_EQ(r.body, kTreeResponse);
        platform_->merger()->wait_idle();
        return platform_->gateway().stats().instances.size() == 4;
      },
      30000ms));
  auto stats = platform_->gateway().stats();
  auto abde = stats.routes.at(FunctionId("A")).id;
  for (auto n : {"B", "D", "E"}) {
    EXPECT_EQ(stats.routes.at(FunctionId(n)).id, abde);
  }
  for (auto n : {"C", "F", "G"}) {
    EXPECT_NE(stats.routes.at(FunctionId(n)).id, abde);
  }
  for (int i = 0; i < 5; ++i) EXPECT_EQ(invoke("A", "p").body, kTreeResponse);
  EXPECT_EQ(invoke("D", "q").body, "D(q){d}");

  auto logged = MergeEventLog::read(platform_->config().merge_log);
  EXPECT_EQ(logged.size(), 3u);
  for (const auto& e : logged) EXPECT_EQ(e.outcome, MergeOutcome::kCompleted);
}

TEST_F(PlatformTest, ConcurrentTrafficDuringMergeSucceeds) {
  start(true, false);
  deploy("A", "compute 30\ncall B sync\n");
  deploy("B", "compute 30\nemit b\n");
  std::atomic<bool> stop{false};
  std::atomic<int> failures{0};
  std::atomic<int> done{0};
  std::vector<std::thread> clients;
  for (int t = 0; t < 8; ++t) {
    clients.emplace_back([&] {
      while (!stop) {
        auto r = invoke("A", "x");
        if (r.status != 200 || r.body != "A(x){B(x){b}}") ++failures;
        ++done;
      }
    });
  }
  std::this_thread::sleep_for(300ms);
  auto b_addr = platform_->routing().snapshot()->find(FunctionId("B"))->address;
  auto ack = platform_->merger()->submit_fusion_request(
      {FunctionId("A"), std::nullopt, b_addr, 0});
  EXPECT_EQ(ack.status, AckStatus::kEnqueued);
  platform_->merger()->wait_idle();
  std::this_thread::sleep_for(300ms);
  stop = true;
  for (auto& c : clients) c.join();
  EXPECT_EQ(failures.load(), 0);
  EXPECT_GT(done.load(), 20);
  EXPECT_EQ(platform_->gateway().stats().instances.size(), 1u);
}

TEST(PlatformConfigTest, RejectsUnsupportedBackend) {
  TempDir dir;
  auto config = testing::platform_config(dir.path(), true);
  config.sandbox_backend = "firecracker";
  EXPECT_THROW(Platform{config}, Error);
  config = testing::platform_config(dir.path(), true);
  config.handler_command.clear();
  EXPECT_THROW(Platform{config}, Error);
}

}  // namespace
}  // namespace fusebox
