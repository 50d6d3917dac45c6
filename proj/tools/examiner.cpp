/* Copyright 2026 The Examiner Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "examiner/commands.hpp"
#include "examiner/parallel.hpp"

int main(int argc, char** argv) {
  examiner::CommandOptions opts;
  opts.workers = examiner::default_workers();

  CLI::App app{"examiner: black-box failure-mode search for pose estimators"};
  app.require_subcommand(1, 1);
  app.fallthrough();

  std::string config, out, stop_after, file, landscape;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  app.add_option("--config", config, "Run or curriculum config (JSON)");
  app.add_option("--out", out, "Run directory");
  auto* seed_opt = app.add_option("--seed", seed, "Master seed (overrides the config)");
  app.add_option("--workers", opts.workers, "Worker threads")->check(CLI::PositiveNumber);

  auto* search = app.add_subcommand("search", "Phase 1 search and phase 2 boundary expansion");
  search->add_option("--stop-after", stop_after, "Stop after a phase")->check(CLI::IsMember({"phase1"}));
  search->add_flag("--restart", opts.restart, "Discard a previous run in --out");

  auto* metrics = app.add_subcommand("metrics", "Robustness report for a finished search");
  auto* samples_opt = metrics->add_option("--samples", samples, "Samples per mode")
                          ->check(CLI::PositiveNumber);

  auto* sample = app.add_subcommand("sample", "Export adversarial samples from failure modes");
  sample->add_option("--count", opts.count, "Samples per mode")->check(CLI::PositiveNumber);
  sample->add_option("--file", file, "Output JSONL path");

  app.add_subcommand("curriculum", "Easy-to-hard examine and train loop");

  auto* serve = app.add_subcommand("sut-serve", "Serve a synthetic landscape over stdio");
  serve->add_option("--landscape", landscape, "Landscape JSON")->required();

  app.add_subcommand("export-csv", "Write report.csv and per-iteration traces");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (!config.empty()) opts.config = config;
  if (!out.empty()) opts.out = out;
  if (*seed_opt) opts.seed = seed;
  if (!stop_after.empty()) opts.stop_after = stop_after;
  if (*samples_opt) opts.samples = samples;
  if (!file.empty()) opts.file = file;
  if (!landscape.empty()) opts.landscape = landscape;

  const std::string name = app.get_subcommands().front()->get_name();
  return examiner::run_command(name, opts, std::cin, std::cout, std::cerr);
}
