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

// Gaussian-bump error landscapes used as an in-process system under test.

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "examiner/param_space.hpp"
#include "json.hpp"

namespace examiner {

// Per-pose errors in millimetres.
struct EvalResult {
  double err_2d = 0.0;
  double err_3d = 0.0;
  bool operator==(const EvalResult&) const = default;
};

struct Bump {
  Vector center;
  double amplitude;  // mm, > 0
  double width;      // radians, > 0
};

// err_3d(p) = baseline + sum_k amplitude_k * exp(-|p - center_k|^2 / (2 width_k^2))
// err_2d(p) = err2d_ratio * err_3d(p)
class SyntheticLandscape {
 public:
  SyntheticLandscape(double baseline, std::vector<Bump> bumps, double err2d_ratio = 1.0,
                     bool trainable = false, double damping = 0.5,
                     double train_radius = 2.0);

  // Bump-free landscape; accepts poses of any length.
  static SyntheticLandscape constant(double value);
  static SyntheticLandscape from_json(const nlohmann::json& j);
  static SyntheticLandscape load(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  // Dimensionality of the bump centers; 0 when there are no bumps (any pose
  // length is accepted then).
  std::size_t dims() const { return dims_; }
  double baseline() const { return baseline_; }
  const std::vector<Bump>& bumps() const { return bumps_; }
  double err2d_ratio() const { return err2d_ratio_; }
  bool trainable() const { return trainable_; }
  double damping() const { return damping_; }
  double train_radius() const { return train_radius_; }

  double err_3d(const Pose& pose) const;
  EvalResult evaluate(const Pose& pose) const;

  // Multiplies the amplitude of every bump with a sample within
  // train_radius * width of its center by `damping`, once per call.
  // Returns the number of damped bumps.
  std::size_t damp(std::span<const Pose> samples);

  // Stable identity derived from the landscape content.
  std::string identity() const;

 private:
  double baseline_;
  std::vector<Bump> bumps_;
  double err2d_ratio_;
  bool trainable_;
  double damping_;
  double train_radius_;
  std::size_t dims_ = 0;
};

// Radius of {p : err_3d(p) >= threshold} for a single isolated bump, or 0
// when the peak does not reach the threshold.
double bump_threshold_radius(double baseline, double amplitude, double width, double threshold);

}  // namespace examiner
