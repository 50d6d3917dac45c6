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

// Adversary-set construction, epsilon-mixed batches and the easy-to-hard
// examine/train loop.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "examiner/examination.hpp"
#include "examiner/metrics.hpp"
#include "examiner/phase2.hpp"
#include "examiner/sut.hpp"
#include "json.hpp"

namespace examiner {

struct DifficultyPreset {
  std::string name;  // easy | standard | hard | custom
  double adversarial_threshold = 90.0;
  double policy_half_width = 2.0;
  nlohmann::json nuisance = nlohmann::json::object();

  nlohmann::json to_json() const;
  // A preset name, or an object with explicit fields (name "custom").
  static DifficultyPreset from_json(const nlohmann::json& j);
};

// easy: T=80, [-1.5, 1.5]; standard: T=90, [-2, 2]; hard: T=90, [-3, 3].
DifficultyPreset named_preset(const std::string& name);

// Copies `base` with the preset's threshold (both phases) and policy bounds.
ExaminerSetup apply_preset(const ExaminerSetup& base, const DifficultyPreset& preset);

struct AdversaryRecord {
  Pose pose;
  nlohmann::json overrides = nlohmann::json::object();
  std::size_t mode_id = 0;
  double err_3d = 0.0;
  std::size_t loop = 0;

  nlohmann::json to_json() const;
  static AdversaryRecord from_json(const nlohmann::json& j);
};

// Append-only collection of adversarial samples.
class AdversarySet {
 public:
  void append(std::span<const AdversaryRecord> records);
  const std::vector<AdversaryRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

 private:
  std::vector<AdversaryRecord> records_;
};

// m valid samples per mode, each annotated with its error at sampling time.
std::vector<AdversaryRecord> build_adversary_set(std::span<const FailureMode> modes,
                                                 std::size_t m, SutPool& pool,
                                                 const KinematicTree& tree,
                                                 const ValidityHook& hook,
                                                 std::uint64_t master_seed,
                                                 std::size_t workers = 1);

struct MixIndices {
  std::vector<std::size_t> adversary;
  std::vector<std::size_t> base;
};

// Exactly round(epsilon * batch_size) adversary indices (without replacement
// when the set is large enough), the rest from the base set.
MixIndices epsilon_mix(std::size_t adversary_size, std::size_t base_size, double epsilon,
                       std::size_t batch_size, RngStream& rng);

struct CurriculumConfig {
  std::vector<DifficultyPreset> presets;  // loop k uses presets[min(k, size-1)]
  std::size_t loops = 5;
  std::size_t samples_per_mode = 500;
  double epsilon = 0.1;
  double lr_discount = 0.05;
  std::size_t batch_size = 1000;

  static CurriculumConfig defaults();
  void validate() const;
  nlohmann::json to_json() const;
  static CurriculumConfig from_json(const nlohmann::json& j);
};

struct LoopReport {
  std::size_t loop = 0;
  DifficultyPreset preset;
  std::uint64_t seed = 0;
  std::optional<RobustnessReport> pre;
  std::optional<RobustnessReport> post;  // pre's samples re-evaluated after training
  std::size_t adversary_added = 0;
  std::size_t adversary_total = 0;
  std::size_t batch_from_adversary = 0;
  std::size_t batch_from_base = 0;
  std::string train;  // trained | unsupported | skipped
  std::optional<std::string> error;

  nlohmann::json to_json() const;
};

struct CurriculumReport {
  std::vector<LoopReport> loops;
  AdversarySet adversary_set;
  std::string stop_reason;  // completed | unsupported | error

  nlohmann::json to_json() const;
};

struct LoopArtifacts {
  const LoopReport& report;
  const Examination& examination;
};
using LoopObserver = std::function<void(const LoopArtifacts&)>;

CurriculumReport run_curriculum(const CurriculumConfig& config, const ExaminerSetup& setup,
                                SutPool& pool, std::span<const Pose> base_set,
                                std::uint64_t master_seed, const LoopObserver& observer = {});

}  // namespace examiner
