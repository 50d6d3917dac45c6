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

#include "examiner/decoder.hpp"
#include "examiner/landscape.hpp"
#include "examiner/param_space.hpp"
#include "examiner/phase1.hpp"
#include "examiner/phase2.hpp"
#include "examiner/sut.hpp"
#include "json.hpp"

namespace examiner {

// Either an in-process landscape or an external command.
struct SutSpec {
  std::optional<SyntheticLandscape> landscape;
  std::vector<std::string> external;
  double timeout_seconds = 30.0;
  NuisanceConfig nuisance = nlohmann::json::object();

  nlohmann::json to_json() const;
  static SutSpec from_json(const nlohmann::json& j, const nlohmann::json& nuisance,
                           const std::filesystem::path& base_dir);
};

SutFactory make_sut_factory(const SutSpec& spec);

// Run configuration. Referenced files (tree, decoder, landscape) are resolved
// relative to the config file and inlined on load, so the stored copy is
// self-contained.
struct RunConfig {
  std::uint64_t master_seed = 0;
  KinematicTree tree;
  Decoder decoder;
  SutSpec sut;
  Phase1Config phase1;
  Phase2Config phase2;
  std::size_t metrics_samples = 200;
  std::filesystem::path output_dir;

  static RunConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
  static RunConfig load(const std::filesystem::path& path);

  // Self-contained form, written to the run directory and loadable again.
  nlohmann::json to_json() const;

  // Content hash over everything that determines results. The SUT enters by
  // its reported name and nuisance, not by transport, so an in-process
  // landscape and the same landscape served over stdio share a fingerprint.
  std::string fingerprint(const std::string& sut_name) const;
};

}  // namespace examiner
