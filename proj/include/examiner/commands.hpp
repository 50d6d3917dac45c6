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

#pragma once

// Command implementations behind the `examiner` executable.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace examiner {

struct CommandOptions {
  std::optional<std::filesystem::path> config;
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
  std::size_t workers = 1;

  // search
  std::optional<std::string> stop_after;  // "phase1"
  bool restart = false;
  // metrics
  std::optional<std::size_t> samples;
  // sample
  std::size_t count = 500;
  std::optional<std::filesystem::path> file;
  // sut-serve
  std::optional<std::filesystem::path> landscape;
};

void cmd_search(const CommandOptions& opts);
void cmd_metrics(const CommandOptions& opts);
void cmd_sample(const CommandOptions& opts);
void cmd_curriculum(const CommandOptions& opts);
int cmd_sut_serve(const CommandOptions& opts, std::istream& in, std::ostream& out,
                  std::ostream& log);
void cmd_export_csv(const CommandOptions& opts);

// Runs one command; on failure prints {"error":..., "exit_code":...} to `err`
// and returns the exit code.
int run_command(const std::string& name, const CommandOptions& opts, std::istream& in,
                std::ostream& out, std::ostream& err);

}  // namespace examiner
