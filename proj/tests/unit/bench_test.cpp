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

#include <sstream>

#include "fusebox/bench/apps.hpp"
#include "fusebox/bench/load_generator.hpp"
#include "fusebox/bench/report.hpp"
#include "fusebox/bench/run_record.hpp"
#include "fusebox/bench/runner.hpp"
#include "fusebox/core/error.hpp"
#include "fusebox/runtime/archive.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using namespace std::chrono_literals;

namespace fusebox::bench {
namespace {

using fusebox::testing::TempDir;

std::set<std::set<FunctionId>> groups_of(const WorkloadApp& app) {
  auto g = compute_fusion_groups(app.graph);
  return {g.begin(), g.end()};
}

std::set<FunctionId> ids(std::initializer_list<const char*> names) {
  std::set<FunctionId> out;
  for (auto n : names) out.emplace(n);
  return out;
}

TEST(AppsTest, TreeGroups) {
  auto app = build_app(AppName::kTree);
  EXPECT_EQ(app.graph.functions().size(), 7u);
  EXPECT_EQ(app.entry, FunctionId("A"));
  EXPECT_EQ(groups_of(app),
            (std::set<std::set<FunctionId>>{ids({"A", "B", "D", "E"}),
                                            ids({"C"}), ids({"F"}),
                                            ids({"G"})}));
}

TEST(AppsTest, IotGroups) {
  auto app = build_app(AppName::kIot);
  EXPECT_EQ(app.graph.functions().size(), 6u);
  EXPECT_EQ(groups_of(app),
            (std::set<std::set<FunctionId>>{
                ids({"AnalyzeSensor", "Temperature", "AirQuality", "Traffic",
                     "Combine"}),
                ids({"Store"})}));
}

TEST(AppsTest, NamesParse) {
  EXPECT_EQ(parse_app_name("TREE"), AppName::kTree);
  EXPECT_EQ(parse_app_name("iot"), AppName::kIot);
  EXPECT_THROW(parse_app_name("web"), Error);
}

TEST(AppsTest, MaterializedFunctionsAreValidSingleFunctionBundles) {
  TempDir dir;
  auto app = build_app(AppName::kTree, 25);
  auto dirs = app.materialize(dir.path());
  EXPECT_EQ(dirs.size(), 7u);
  for (const auto& [fn, path] : dirs) {
    auto staged = dir / ("bundle-" + fn.str());
    unpack_archive(pack_directory(path), staged / fn.str());
    EXPECT_NO_THROW(Bundle::create(staged, {fn}));
    auto script = fusebox::testing::read_file(path / kEntryModule);
    EXPECT_NE(script.find("compute 25"), std::string::npos);
  }
  auto b = fusebox::testing::read_file(dirs.at(FunctionId("B")) / kEntryModule);
  EXPECT_NE(b.find("call D sync"), std::string::npos);
  EXPECT_NE(b.find("call E sync"), std::string::npos);
}

TEST(AppsTest, CriticalPathSavingEqualsRemovedHops) {
  // Analytic model: fusion removes exactly the sync hops inside groups.
  for (auto name : {AppName::kTree, AppName::kIot}) {
    auto app = build_app(name, 40);
    std::map<FunctionId, double> compute;
    std::map<FunctionId, int> apart;
    std::map<FunctionId, int> fused;
    int i = 0;
    for (const auto& fn : app.graph.functions()) {
      compute[fn] = app.compute_delay(fn);
      apart[fn] = i++;
    }
    int g = 0;
    for (const auto& group : compute_fusion_groups(app.graph)) {
      for (const auto& fn : group) fused[fn] = g;
      ++g;
    }
    double hop = 50;
    double vanilla = fusebox::testing::critical_path_ms(app.graph, app.entry,
                                                        compute, hop, apart);
    double fusion = fusebox::testing::critical_path_ms(app.graph, app.entry,
                                                       compute, hop, fused);
    double expected_hops = name == AppName::kTree ? 3 : 4;
    EXPECT_DOUBLE_EQ(vanilla - fusion, expected_hops * hop);
  }
}

TEST(PercentileTest, LinearInterpolation) {
  EXPECT_DOUBLE_EQ(percentile({}, 0.5), 0.0);
  EXPECT_DOUBLE_EQ(percentile({5}, 0.95), 5.0);
  EXPECT_DOUBLE_EQ(percentile({1, 2, 3, 4}, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(percentile({4, 1, 3, 2, 5}, 0.5), 3.0);
  EXPECT_DOUBLE_EQ(percentile({0, 10}, 0.95), 9.5);
}

RunRecord synthetic(Mode mode, double latency, std::size_t instances,
                    std::uint64_t rss, std::vector<double> merges = {}) {
  RunRecord r;
  r.params = {"tree", mode, 20, 5.0, 50, 10};
  r.started_at_ms = 1000;
  for (std::size_t i = 0; i < 20; ++i) {
    r.requests.push_back({i, i * 200.0, latency, 200, "body" + std::to_string(i)});
  }
  for (int t = 0; t < 16; ++t) {
    r.samples.push_back({t * 250.0, instances, rss});
  }
  for (double m : merges) {
    MergeEvent e;
    e.outcome = MergeOutcome::kCompleted;
    e.completed_at_ms = 1000 + static_cast<std::int64_t>(m);
    r.merges.push_back(e);
  }
  return r;
}

TEST(ReportTest, IdenticalRecordsShowNoReduction) {
  auto a = synthetic(Mode::kVanilla, 100, 7, 7000);
  auto b = synthetic(Mode::kFusion, 100, 7, 7000);
  auto c = compare_runs(a, b);
  EXPECT_DOUBLE_EQ(c.latency_reduction_ms, 0);
  EXPECT_DOUBLE_EQ(c.latency_reduction_pct, 0);
  EXPECT_DOUBLE_EQ(c.rss_reduction_pct, 0);
  EXPECT_DOUBLE_EQ(c.instance_reduction_pct, 0);
  EXPECT_EQ(c.response_mismatches, 0u);
}

TEST(ReportTest, ReductionsAgainstHandComputedValues) {
  auto a = synthetic(Mode::kVanilla, 500, 7, 7000);
  auto b = synthetic(Mode::kFusion, 350, 4, 4000, {300, 600, 900});
  auto c = compare_runs(a, b);
  EXPECT_DOUBLE_EQ(c.steady_window_start_ms, 1800);
  EXPECT_DOUBLE_EQ(c.latency_reduction_ms, 150);
  EXPECT_DOUBLE_EQ(c.latency_reduction_pct, 30);
  EXPECT_NEAR(c.instance_reduction_pct, 3.0 / 7.0 * 100, 1e-9);
  EXPECT_NEAR(c.rss_reduction_pct, 3.0 / 7.0 * 100, 1e-9);
  EXPECT_EQ(c.baseline.steady.count, 11u);  // sent_ms >= 1800
  EXPECT_EQ(c.merge_markers_ms, (std::vector<double>{300, 600, 900}));
}

TEST(ReportTest, RefusesMismatchedOrInvalidRecords) {
  auto a = synthetic(Mode::kVanilla, 100, 7, 7000);
  auto b = synthetic(Mode::kFusion, 100, 7, 7000);
  b.params.hop_delay_ms = 10;
  EXPECT_THROW(compare_runs(a, b), Error);
  b = synthetic(Mode::kFusion, 100, 7, 7000);
  b.valid = false;
  b.invalid_reason = "x";
  EXPECT_THROW(compare_runs(a, b), Error);
}

TEST(ReportTest, CountsResponseMismatches) {
  auto a = synthetic(Mode::kVanilla, 100, 7, 7000);
  auto b = synthetic(Mode::kFusion, 100, 7, 7000);
  b.requests[3].body = "different";
  b.requests[4].status = 502;
  EXPECT_EQ(compare_runs(a, b).response_mismatches, 2u);
}

TEST(ReportTest, WritesJsonAndCsvSiblings) {
  TempDir dir;
  auto a = synthetic(Mode::kVanilla, 500, 7, 7000);
  auto b = synthetic(Mode::kFusion, 350, 4, 4000, {300});
  write_report(compare_runs(a, b), a, b, dir / "out" / "report.json");
  for (auto suffix : {"", ".latency.csv", ".resources.csv", ".markers.csv"}) {
    EXPECT_TRUE(fs::exists(dir / "out" / (std::string("report.json") + suffix)))
        << suffix;
  }
  auto latency = fusebox::testing::read_file(dir / "out" / "report.json.latency.csv");
  EXPECT_EQ(std::count(latency.begin(), latency.end(), '\n'), 41);
}

TEST(RunRecordTest, RoundTrip) {
  auto r = synthetic(Mode::kFusion, 123.5, 4, 4000, {300, 600});
  r.requests[2].body = "with \"quotes\"\nand newline";
  r.duration_ms = 4000;
  std::stringstream buffer;
  write_run_record(r, buffer);
  auto back = read_run_record(buffer);
  EXPECT_EQ(back.params.app, "tree");
  EXPECT_EQ(back.params.mode, Mode::kFusion);
  EXPECT_EQ(back.params.hop_delay_ms, 50);
  EXPECT_EQ(back.requests.size(), 20u);
  EXPECT_EQ(back.requests[2].body, r.requests[2].body);
  EXPECT_DOUBLE_EQ(back.requests[7].latency_ms, 123.5);
  EXPECT_EQ(back.samples.size(), r.samples.size());
  EXPECT_EQ(back.merge_times_ms(), r.merge_times_ms());
  EXPECT_TRUE(back.valid);
}

TEST(LoadGeneratorTest, IssuesOnScheduleRegardlessOfLatency) {
  const double rate = 50;
  const std::size_t n = 50;
  auto start = std::chrono::steady_clock::now() + 20ms;
  // Each request takes 5x the inter-arrival gap; an open loop must not wait.
  auto records = run_open_loop(
      n, rate,
      [](std::size_t) {
        std::this_thread::sleep_for(100ms);
        return Response{200, "ok"};
      },
      start);
  ASSERT_EQ(records.size(), n);
  double last = records.back().sent_ms;
  double achieved = (n - 1) / (last / 1000.0);
  EXPECT_NEAR(achieved, rate, rate * 0.05);
  for (std::size_t i = 0; i < n; ++i) {
    EXPECT_NEAR(records[i].sent_ms, i * 1000.0 / rate, 15.0) << i;
    EXPECT_GE(records[i].latency_ms, 100.0);
  }
}

TEST(LoadGeneratorTest, StopsOnTransportFailure) {
  std::atomic<int> calls{0};
  auto records = run_open_loop(
      100, 100,
      [&](std::size_t i) {
        ++calls;
        return Response{i == 3 ? 0 : 200, ""};
      },
      std::chrono::steady_clock::now());
  EXPECT_LT(records.size(), 100u);
  EXPECT_EQ(records[3].status, 0);
}

TEST(RunnerTest, ShortVanillaRunIsCleanAndNeverMerges) {
  RunOptions options;
  options.app = AppName::kTree;
  options.mode = Mode::kVanilla;
  options.requests = 10;
  options.rate = 10;
  options.compute_delay_ms = 1;
  options.handler_command = {fusebox::testing::stub_handler().string()};
  auto record = run_benchmark(options);
  ASSERT_TRUE(record.valid) << record.invalid_reason;
  EXPECT_EQ(record.requests.size(), 10u);
  EXPECT_EQ(record.failures(), 0u);
  EXPECT_TRUE(record.merges.empty());
  ASSERT_FALSE(record.samples.empty());
  EXPECT_EQ(record.samples.back().instances, 7u);
  EXPECT_EQ(record.requests[4].body, "A(req-4){B(req-4){D(req-4){},E(req-4){}}}");
}

TEST(RunnerTest, UnreachablePlatformInvalidatesRecord) {
  RunOptions options;
  options.requests = 5;
  options.gateway = Address{"127.0.0.1", 1};
  auto record = run_benchmark(options);
  EXPECT_FALSE(record.valid);
  EXPECT_FALSE(record.invalid_reason.empty());
}

}  // namespace
}  // namespace fusebox::bench
