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

// bench run    --app {tree|iot} --mode {vanilla|fusion} --requests N --rate R
//              --hop-delay MS --out FILE
// bench report --baseline FILE --candidate FILE --out FILE

#include <csignal>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "fusebox/bench/report.hpp"
#include "fusebox/bench/runner.hpp"
#include "fusebox/core/error.hpp"

namespace bench = fusebox::bench;

int main(int argc, char** argv) {
  std::signal(SIGPIPE, SIG_IGN);
  CLI::App cli{"fusebox benchmark harness"};
  cli.require_subcommand(1);
  std::string log_level = "warn";
  cli.add_option("--log-level", log_level, "trace|debug|info|warn|error");

  auto* run = cli.add_subcommand("run", "drive one workload run");
  std::string app = "tree";
  std::string mode = "vanilla";
  std::string detector = "handler";
  std::string handler;
  std::string gateway;
  std::string merger;
  std::string workdir;
  std::string out;
  bench::RunOptions options;
  run->add_option("--app", app, "tree|iot")->check(CLI::IsMember({"tree", "iot"}));
  run->add_option("--mode", mode, "vanilla|fusion")
      ->check(CLI::IsMember({"vanilla", "fusion"}));
  run->add_option("--requests", options.requests, "number of requests")
      ->check(CLI::PositiveNumber);
  run->add_option("--rate", options.rate, "requests per second")
      ->check(CLI::PositiveNumber);
  run->add_option("--hop-delay", options.hop_delay_ms,
                  "delay injected into every remote invocation (ms)")
      ->check(CLI::NonNegativeNumber);
  run->add_option("--compute-delay", options.compute_delay_ms,
                  "per-function compute delay (ms)")
      ->check(CLI::NonNegativeNumber);
  run->add_option("--detector", detector, "handler|scripted")
      ->check(CLI::IsMember({"handler", "scripted"}));
  run->add_option("--handler", handler, "handler executable for sandboxes");
  run->add_option("--gateway", gateway, "use a running platform (host:port)");
  run->add_option("--merger", merger, "merger endpoint of that platform");
  run->add_option("--workdir", workdir, "scratch directory");
  run->add_option("--out", out, "run record output file")->required();

  auto* report = cli.add_subcommand("report", "compare two run records");
  std::string baseline_path;
  std::string candidate_path;
  std::string report_out;
  report->add_option("--baseline", baseline_path)->required();
  report->add_option("--candidate", candidate_path)->required();
  report->add_option("--out", report_out)->required();

  CLI11_PARSE(cli, argc, argv);
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    if (*run) {
      options.app = bench::parse_app_name(app);
      options.mode = bench::parse_mode(mode);
      options.detector = detector == "scripted" ? bench::Detector::kScripted
                                                : bench::Detector::kHandler;
      if (!handler.empty()) options.handler_command = {handler};
      if (!gateway.empty()) options.gateway = fusebox::Address::parse(gateway);
      if (!merger.empty()) options.merger = fusebox::Address::parse(merger);
      options.workdir = workdir;
      auto record = bench::run_benchmark(options);
      bench::save_run_record(record, out);
      std::cout << "requests " << record.requests.size() << ", failures "
                << record.failures() << ", merges " << record.merges.size()
                << ", valid " << (record.valid ? "yes" : "no") << '\n';
      return record.valid ? 0 : 1;
    }
    auto baseline = bench::load_run_record(baseline_path);
    auto candidate = bench::load_run_record(candidate_path);
    auto comparison = bench::compare_runs(baseline, candidate);
    bench::write_report(comparison, baseline, candidate, report_out);
    std::cout << bench::to_json(comparison).dump(2) << '\n';
  } catch (const fusebox::Error& e) {
    std::cerr << "bench: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
