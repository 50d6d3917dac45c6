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

// Boundary expansion: grows an axis-aligned box around each adversarial seed
// one (joint, side) slab at a time while every sample in the slab stays above
// the adversarial threshold.

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "examiner/param_space.hpp"
#include "examiner/phase1.hpp"
#include "examiner/rng.hpp"
#include "examiner/sut.hpp"
#include "json.hpp"

namespace examiner {

struct Phase2Config {
  std::size_t samples_per_slab = 50;  // m
  double adversarial_threshold = 90.0;
  double delta_init = 0.05;
  double delta_min = 0.005;
  double delta_max = 0.05;
  double delta_slope = 0.001;  // rad per mm above threshold
  std::size_t max_iterations = 300;
  // Retry sides that failed acceptance instead of freezing them for good.
  bool reprobe_frozen = false;

  void validate() const;
  nlohmann::json to_json() const;
  static Phase2Config from_json(const nlohmann::json& j);
};

struct FailureMode {
  std::size_t agent_id = 0;
  Pose seed;
  Vector phi_up;   // >= 0, radians
  Vector phi_low;  // >= 0, radians
  std::size_t iterations_used = 0;
  std::vector<std::array<bool, 2>> frozen;  // per joint, indexed by Side
  bool complete = true;

  bool operator==(const FailureMode&) const = default;

  Vector box_low() const;
  Vector box_high() const;

  nlohmann::json to_json() const;
  static FailureMode from_json(const nlohmann::json& j);
};

struct ExpansionRecord {
  std::size_t agent = 0;
  std::size_t iter = 0;
  std::size_t joint = 0;
  Side side = Side::kUpper;
  double delta = 0.0;  // step used for this slab
  std::optional<double> slab_min_err;
  bool accepted = false;
  std::string outcome;  // accepted | below_threshold | invalid_pose | empty_slab

  nlohmann::json to_json() const;
};

// m poses equal to the seed except on joint j, whose three dims are drawn
// from the slab beyond the current bound on `side` and clipped to the joint
// limits. nullopt when the slab lies entirely outside the limits.
std::optional<std::vector<Pose>> slab_samples(const FailureMode& mode, std::size_t joint,
                                              Side side, double delta, std::size_t m,
                                              const KinematicTree& tree, RngStream& rng);

// min(slope * (min_err - T) + delta_min, delta_max).
double update_step_size(double min_err, double threshold, const Phase2Config& config = {});

FailureMode make_mode(const AdversarialSeed& seed, const KinematicTree& tree);

struct ExpansionResult {
  FailureMode mode;
  std::vector<ExpansionRecord> log;
  std::optional<std::string> error;
};

ExpansionResult expand_boundary(const AdversarialSeed& seed, Sut& sut, const KinematicTree& tree,
                                const ValidityHook& hook, const Phase2Config& config,
                                RngStream& rng);

struct Phase2Result {
  std::vector<FailureMode> modes;  // agent-id order, succeeded seeds only
  std::vector<ExpansionRecord> log;
  std::vector<std::pair<std::size_t, std::string>> errors;  // (agent, message)
};

Phase2Result seed_to_mode_pipeline(const std::vector<AdversarialSeed>& seeds, SutPool& pool,
                                   const KinematicTree& tree, const ValidityHook& hook,
                                   const Phase2Config& config, std::uint64_t master_seed,
                                   std::size_t workers);

}  // namespace examiner
