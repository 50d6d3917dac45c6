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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace examiner {

struct RunStatus {
  std::string fingerprint;
  std::uint64_t master_seed = 0;
  bool phase1_done = false;
  bool phase2_done = false;
  bool metrics_done = false;

  nlohmann::json to_json() const;
  static RunStatus from_json(const nlohmann::json& j);
};

// Layout of a run directory. Every write goes through a temp file and a
// rename, so a reader never sees a half-written artifact.
class RunDirectory {
 public:
  explicit RunDirectory(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path path(const char* name) const { return root_ / name; }

  std::optional<RunStatus> read_status() const;
  void write_status(const RunStatus& status) const;

  void write_json(const char* name, const nlohmann::json& j) const;
  nlohmann::json read_json(const char* name) const;
  // A {"type":"header",...} line followed by one line per record.
  void write_jsonl(const char* name, const nlohmann::json& header,
                   const std::vector<nlohmann::json>& lines) const;

  static constexpr const char* kConfig = "config.json";
  static constexpr const char* kStatus = "status.json";
  static constexpr const char* kPhase1Log = "phase1_log.jsonl";
  static constexpr const char* kPhase1Seeds = "phase1_seeds.json";
  static constexpr const char* kFailureModes = "failure_modes.json";
  static constexpr const char* kPhase2Log = "phase2_log.jsonl";
  static constexpr const char* kMetricsSamples = "metrics_samples.jsonl";
  static constexpr const char* kReport = "report.json";
  static constexpr const char* kReportCsv = "report.csv";
  static constexpr const char* kPhase1Trace = "phase1_trace.csv";
  static constexpr const char* kPhase2Trace = "phase2_trace.csv";
  static constexpr const char* kAdversarySet = "adversary_set.jsonl";
  static constexpr const char* kCurriculumReport = "curriculum_report.json";

 private:
  std::filesystem::path root_;
};

}  // namespace examiner
