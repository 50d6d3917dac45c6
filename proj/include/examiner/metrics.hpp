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

// Boundary-quality and robustness metrics over discovered failure modes.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "examiner/param_space.hpp"
#include "examiner/phase1.hpp"
#include "examiner/phase2.hpp"
#include "examiner/sut.hpp"
#include "json.hpp"

namespace examiner {

struct ModeStats {
  double pnae = 0.0;  // fraction of samples with err_3d < T
  double min_mpjpe = 0.0;
  double mean_mpjpe = 0.0;
  double max_mpjpe = 0.0;
  double median_mpjpe = 0.0;
  std::size_t samples_used = 0;

  bool operator==(const ModeStats&) const = default;
  nlohmann::json to_json() const;
};

// Mean over modes of |phi_up + phi_low|_2. MetricError on an empty list.
double region_size(std::span<const FailureMode> modes);

// Uniform draws from [seed - phi_low, seed + phi_up], resampled until valid.
// At most 100 * count draws before SamplingError; a zero-width box returns
// `count` copies of the seed.
std::vector<Pose> sample_mode(const FailureMode& mode, std::size_t count,
                              const KinematicTree& tree, const ValidityHook& hook,
                              RngStream& rng);

// Stats over a batch of 3D errors; MetricError when empty.
ModeStats stats_from_errors(std::span<const double> err_3d, double threshold);

struct ModeEvaluation {
  std::size_t mode_id = 0;  // agent id of the mode
  std::vector<Pose> poses;
  std::vector<EvalResult> results;
  ModeStats stats;
};

ModeEvaluation evaluate_mode(const FailureMode& mode, Sut& sut, std::size_t count,
                             double threshold, const KinematicTree& tree,
                             const ValidityHook& hook, RngStream& rng);

ModeStats mode_stats(const FailureMode& mode, Sut& sut, std::size_t count, double threshold,
                     const KinematicTree& tree, const ValidityHook& hook, RngStream& rng);

// succeeded / (total - errored). MetricError when every agent errored.
double success_rate(std::span<const AdversarialSeed> seeds);

struct RobustnessReport {
  double success_rate = 0.0;
  std::size_t num_agents = 0;
  std::size_t num_succeeded = 0;
  std::size_t num_errored = 0;
  std::optional<double> region_size;  // absent without modes
  std::vector<ModeEvaluation> modes;
  std::optional<ModeStats> aggregate;
  double adversarial_threshold = 0.0;
  std::string fingerprint;
  std::uint64_t master_seed = 0;

  // Summary without the per-sample data.
  nlohmann::json to_json() const;
  // One line per sample: {mode, pose, err2d, err3d}.
  std::vector<nlohmann::json> sample_lines() const;
};

struct ReportSettings {
  std::size_t samples_per_mode = 200;
  double adversarial_threshold = 90.0;
  std::uint64_t master_seed = 0;
  std::string fingerprint;
  std::size_t workers = 1;
};

RobustnessReport robustness_report(std::span<const AdversarialSeed> seeds,
                                   std::span<const FailureMode> modes, SutPool& pool,
                                   const KinematicTree& tree, const ValidityHook& hook,
                                   const ReportSettings& settings);

// Re-evaluates already drawn samples (e.g. after training) and rebuilds the
// per-mode and aggregate stats.
RobustnessReport reevaluate_report(const RobustnessReport& report, SutPool& pool,
                                   std::size_t workers);

}  // namespace examiner
