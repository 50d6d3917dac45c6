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

#include "examiner/run_directory.hpp"

#include "examiner/errors.hpp"
#include "examiner/json_io.hpp"

namespace examiner {

nlohmann::json RunStatus::to_json() const {
  return {{"fingerprint", fingerprint},
          {"master_seed", master_seed},
          {"phase1_done", phase1_done},
          {"phase2_done", phase2_done},
          {"metrics_done", metrics_done}};
}

RunStatus RunStatus::from_json(const nlohmann::json& j) {
  RunStatus s;
  s.fingerprint = j.value("fingerprint", "");
  s.master_seed = j.value("master_seed", std::uint64_t{0});
  s.phase1_done = j.value("phase1_done", false);
  s.phase2_done = j.value("phase2_done", false);
  s.metrics_done = j.value("metrics_done", false);
  return s;
}

RunDirectory::RunDirectory(std::filesystem::path root) : root_(std::move(root)) {
  std::error_code ec;
  std::filesystem::create_directories(root_, ec);
  if (ec) throw ConfigError("cannot create run directory " + root_.string() + ": " + ec.message());
}

std::optional<RunStatus> RunDirectory::read_status() const {
  if (!std::filesystem::exists(path(kStatus))) return std::nullopt;
  return RunStatus::from_json(read_json_file(path(kStatus)));
}

void RunDirectory::write_status(const RunStatus& status) const { write_json(kStatus, status.to_json()); }

void RunDirectory::write_json(const char* name, const nlohmann::json& j) const {
  write_file_atomic(path(name), j.dump(2) + "\n");
}

nlohmann::json RunDirectory::read_json(const char* name) const { return read_json_file(path(name)); }

void RunDirectory::write_jsonl(const char* name, const nlohmann::json& header,
                               const std::vector<nlohmann::json>& lines) const {
  std::string out;
  nlohmann::json h = header;
  h["type"] = "header";
  out += h.dump();
  out += '\n';
  for (const auto& l : lines) {
    out += l.dump();
    out += '\n';
  }
  write_file_atomic(path(name), out);
}

}  // namespace examiner
