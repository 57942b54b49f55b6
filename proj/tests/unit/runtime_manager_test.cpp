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

#include "fusebox/core/error.hpp"
#include "fusebox/runtime/runtime_manager.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using namespace std::chrono_literals;

namespace fusebox {
namespace {

using testing::TempDir;
using testing::call_instance;
using testing::make_bundle;

class RuntimeManagerTest : public ::testing::Test {
 protected:
  RuntimeManagerTest() : manager_(testing::runtime_options(dir_ / "work")) {}

  InstancePtr start(const std::vector<std::pair<std::string, std::string>>& fns,
                    const std::string& name = "b") {
    auto bundle = make_bundle(dir_ / "src" / name, fns);
    auto inst = manager_.deploy({bundle, 0, {}});
    manager_.await_healthy(inst, 5000ms);
    return inst;
  }

  TempDir dir_;
  RuntimeManager manager_;
};

TEST(LifecycleTest, LegalTransitions) {
  using S = InstanceState;
  EXPECT_TRUE(is_legal_transition(S::kStarting, S::kHealthy));
  EXPECT_TRUE(is_legal_transition(S::kStarting, S::kTerminated));
  EXPECT_TRUE(is_legal_transition(S::kHealthy, S::kDraining));
  EXPECT_TRUE(is_legal_transition(S::kDraining, S::kTerminated));
  EXPECT_FALSE(is_legal_transition(S::kHealthy, S::kStarting));
  EXPECT_FALSE(is_legal_transition(S::kHealthy, S::kTerminated));
  EXPECT_FALSE(is_legal_transition(S::kDraining, S::kHealthy));
  EXPECT_FALSE(is_legal_transition(S::kTerminated, S::kHealthy));
  EXPECT_FALSE(is_legal_transition(S::kTerminated, S::kStarting));
}

TEST_F(RuntimeManagerTest, DeployStartsThenTurnsHealthy) {
  auto bundle = make_bundle(dir_ / "src" / "b", {{"A", "emit hi\n"}});
  auto inst = manager_.deploy({bundle, 0, {}});
  EXPECT_EQ(inst->state(), InstanceState::kStarting);
  EXPECT_EQ(inst->hosted(), std::set<FunctionId>{FunctionId("A")});
  manager_.await_healthy(inst, 5000ms);
  EXPECT_EQ(inst->state(), InstanceState::kHealthy);
  auto r = call_instance(inst->address(), "A", "p");
  EXPECT_EQ(r.status, 200);
  EXPECT_EQ(r.body, "A(p){hi}");
  // The platform works on its own copy.
  EXPECT_NE(inst->bundle_root(), bundle.root());
  EXPECT_TRUE(fs::exists(inst->bundle_root() / "A" / "fn"));
}

TEST_F(RuntimeManagerTest, MergedBundleHostsAllAndDispatchesByName) {
  auto inst = start({{"A", "call B sync\nemit a\n"}, {"B", "emit b\n"}});
  EXPECT_EQ(inst->hosted(),
            (std::set<FunctionId>{FunctionId("A"), FunctionId("B")}));
  EXPECT_EQ(call_instance(inst->address(), "A", "x").body, "A(x){B(x){b},a}");
  EXPECT_EQ(call_instance(inst->address(), "B", "x").body, "B(x){b}");
  EXPECT_EQ(call_instance(inst->address(), "Q", "x").status, 404);
  EXPECT_EQ(call_instance(inst->address(), "", "x").status, 400);
}

TEST_F(RuntimeManagerTest, InvalidBundleRejectedBeforeSpawn) {
  auto root = dir_ / "src" / "bad";
  testing::write_file(root / "A" / "fn", "emit a\n");
  testing::write_file(root / kManifestFile, "A\nB\n");
  EXPECT_THROW(manager_.deploy({Bundle::open(root), 0, {}}), Error);
  EXPECT_TRUE(manager_.live_instances().empty());
}

TEST_F(RuntimeManagerTest, RequestedPortConflictIsRejected) {
  auto inst = start({{"A", "emit a\n"}});
  auto bundle = make_bundle(dir_ / "src" / "c", {{"B", "emit b\n"}});
  try {
    manager_.deploy({bundle, inst->address().port, {}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConflict);
    EXPECT_NE(std::string(e.what()).find(inst->address().to_string()),
              std::string::npos);
  }
  EXPECT_EQ(manager_.live_instances().size(), 1u);
}

TEST_F(RuntimeManagerTest, AddressesAreUnique) {
  std::set<Address> seen;
  for (int i = 0; i < 4; ++i) {
    auto inst = start({{"A", "emit a\n"}}, "b" + std::to_string(i));
    EXPECT_TRUE(seen.insert(inst->address()).second);
  }
  EXPECT_EQ(manager_.live_instances().size(), 4u);
}

TEST_F(RuntimeManagerTest, FailedLoadTerminatesAfterHealthGate) {
  auto bundle = make_bundle(dir_ / "src" / "b", {{"A", "fail-load\n"}});
  auto inst = manager_.deploy({bundle, 0, {}});
  try {
    manager_.await_healthy(inst, 2000ms);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTimeout);
  }
  EXPECT_EQ(inst->state(), InstanceState::kTerminated);
  EXPECT_EQ(manager_.find(inst->id()), nullptr);
  EXPECT_EQ(manager_.retired_instances().size(), 1u);
}

TEST_F(RuntimeManagerTest, ZeroHealthTimeoutFailsImmediately) {
  auto bundle = make_bundle(dir_ / "src" / "b", {{"A", "emit a\n"}});
  auto inst = manager_.deploy({bundle, 0, {}});
  auto begin = Clock::now();
  EXPECT_THROW(manager_.await_healthy(inst, 0ms), Error);
  EXPECT_LT(Clock::now() - begin, 500ms);
  EXPECT_EQ(inst->state(), InstanceState::kTerminated);
}

TEST_F(RuntimeManagerTest, ExportReproducesBehaviour) {
  auto inst = start({{"A", "emit a\ncall B sync\n"}, {"B", "emit b\n"}});
  testing::write_file(inst->bundle_root() / "B" / "util" / "data", "bytes");
  auto exported = manager_.export_bundle(*inst, dir_ / "export");
  EXPECT_EQ(testing::read_file(dir_ / "export" / "B" / "util" / "data"),
            "bytes");
  auto twin = manager_.deploy({exported, 0, {}});
  manager_.await_healthy(twin, 5000ms);
  for (auto fn : {"A", "B"}) {
    EXPECT_EQ(call_instance(inst->address(), fn, "q").body,
              call_instance(twin->address(), fn, "q").body);
  }
}

TEST_F(RuntimeManagerTest, ExportRequiresLiveInstance) {
  auto inst = start({{"A", "emit a\n"}});
  manager_.drain_and_terminate(inst, 1000ms);
  try {
    manager_.export_bundle(*inst, dir_ / "export");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFailedPrecondition);
  }
}

TEST_F(RuntimeManagerTest, DrainWithNothingInFlightIsImmediate) {
  auto inst = start({{"A", "emit a\n"}});
  auto begin = Clock::now();
  EXPECT_TRUE(manager_.drain_and_terminate(inst, 10000ms));
  EXPECT_LT(Clock::now() - begin, 1000ms);
  EXPECT_EQ(inst->state(), InstanceState::kTerminated);
  EXPECT_FALSE(inst->try_lease().has_value());
}

TEST_F(RuntimeManagerTest, DrainWaitsForInFlightRequest) {
  auto inst = start({{"A", "compute 200\nemit done\n"}});
  auto lease = inst->try_lease();
  ASSERT_TRUE(lease);
  auto response =
      std::async(std::launch::async, [&, l = std::move(*lease)]() mutable {
        auto held = std::move(l);
        return call_instance(inst->address(), "A", "p");
      });
  std::this_thread::sleep_for(50ms);
  EXPECT_TRUE(manager_.drain_and_terminate(inst, 1000ms));
  auto r = response.get();
  EXPECT_EQ(r.status, 200);
  EXPECT_EQ(r.body, "A(p){done}");
}

TEST_F(RuntimeManagerTest, StuckRequestIsKilledAtDrainTimeout) {
  auto inst = start({{"A", "hang\n"}});
  auto lease = inst->try_lease();
  ASSERT_TRUE(lease);
  auto response =
      std::async(std::launch::async, [&, l = std::move(*lease)]() mutable {
        auto held = std::move(l);
        return call_instance(inst->address(), "A", "p");
      });
  std::this_thread::sleep_for(50ms);
  auto begin = Clock::now();
  EXPECT_FALSE(manager_.drain_and_terminate(inst, 500ms));
  auto waited = Clock::now() - begin;
  EXPECT_GE(waited, 500ms);
  EXPECT_LT(waited, 2000ms);
  EXPECT_EQ(inst->state(), InstanceState::kTerminated);
  EXPECT_NE(response.get().status, 200);

  auto history = inst->history();
  ASSERT_EQ(history.size(), 4u);
  EXPECT_EQ(history[2].state, InstanceState::kDraining);
  EXPECT_EQ(history[3].state, InstanceState::kTerminated);
  EXPECT_GE(history[3].at - history[2].at, 500ms);
}

TEST_F(RuntimeManagerTest, MeasureRss) {
  EXPECT_TRUE(manager_.measure_rss().empty());
  auto inst = start({{"A", "emit a\n"}});
  auto samples = manager_.measure_rss();
  ASSERT_EQ(samples.size(), 1u);
  EXPECT_EQ(samples[0].id, inst->id());
  EXPECT_GT(samples[0].bytes, 0u);
  EXPECT_FALSE(samples[0].died);

  ::kill(inst->pid(), SIGKILL);
  ASSERT_TRUE(testing::eventually(
      [&] {
        auto s = manager_.measure_rss();
        return s.size() == 1 && s[0].died;
      },
      2000ms));
}

TEST_F(RuntimeManagerTest, EnvironmentReachesHandler) {
  auto bundle = make_bundle(dir_ / "src" / "b", {{"A", "emit a\n"}});
  auto inst = manager_.deploy({bundle, 0, {{"APP_MODE", "test"}}});
  manager_.await_healthy(inst, 5000ms);
  EXPECT_EQ(inst->env().at("APP_MODE"), "test");
  auto environ_text =
      testing::read_file("/proc/" + std::to_string(inst->pid()) + "/environ");
  EXPECT_NE(environ_text.find("APP_MODE=test"), std::string::npos);
  EXPECT_NE(environ_text.find("FUSEBOX_INSTANCE_ID=" + inst->id().str()),
            std::string::npos);
}

}  // namespace
}  // namespace fusebox

namespace fusebox {
namespace {

TEST(ProcessBackendTest, RelativeHandlerPathSurvivesWorkdirChange) {
  testing::TempDir dir;
  auto options = testing::runtime_options(dir / "work");
  auto relative = fs::relative(testing::stub_handler(), fs::current_path());
  ASSERT_TRUE(relative.is_relative());
  options.backend = std::make_shared<ProcessBackend>(
      std::vector<std::string>{relative.string()});
  RuntimeManager manager(options);
  auto bundle = testing::make_bundle(dir / "b", {{"A", "emit a\n"}});
  auto inst = manager.deploy({bundle, 0, {}});
  manager.await_healthy(inst, 5000ms);
  EXPECT_EQ(testing::call_instance(inst->address(), "A", "x").body, "A(x){a}");
}

}  // namespace
}  // namespace fusebox
