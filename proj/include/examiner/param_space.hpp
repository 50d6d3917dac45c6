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

// Search spaces, kinematic structure and pose validity.

#include <array>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "examiner/rng.hpp"
#include "json.hpp"

namespace examiner {

using Vector = std::vector<double>;

// Joint rotations in radians, three per joint.
struct Pose {
  Vector angles;

  std::size_t size() const { return angles.size(); }
  bool operator==(const Pose&) const = default;
};

// A point in a policy search space (dimensionless latent units).
struct LatentVector {
  Vector values;

  std::size_t size() const { return values.size(); }
  bool operator==(const LatentVector&) const = default;
};

// Axis-aligned box; lower[i] < upper[i] for every dimension.
class SearchSpace {
 public:
  SearchSpace(Vector lower, Vector upper, std::string label = {});

  // [-half_width, half_width]^dims.
  static SearchSpace cube(std::size_t dims, double half_width,
                          std::string label = {});

  std::size_t dims() const { return lower_.size(); }
  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }
  const std::string& label() const { return label_; }

  bool contains(const Vector& x) const;
  // Componentwise clamp into the box.
  void clamp(Vector& x) const;

  nlohmann::json to_json() const;
  static SearchSpace from_json(const nlohmann::json& j);

 private:
  Vector lower_;
  Vector upper_;
  std::string label_;
};

struct Joint {
  std::string name;
  int parent = -1;  // -1 for a root joint
  std::array<std::size_t, 3> dims{};
};

// Joints in topological order with per-pose-dim angle limits.
class KinematicTree {
 public:
  KinematicTree(std::vector<Joint> joints, Vector limits_low, Vector limits_high);

  // A chain of `count` joints over dims [3j, 3j+3) with uniform limits.
  static KinematicTree chain(std::size_t count, double limit_low,
                             double limit_high);

  static KinematicTree from_json(const nlohmann::json& j);
  static KinematicTree load(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  std::size_t num_joints() const { return joints_.size(); }
  std::size_t pose_dims() const { return limits_low_.size(); }
  const std::vector<Joint>& joints() const { return joints_; }
  const Joint& joint(std::size_t j) const { return joints_.at(j); }
  const Vector& limits_low() const { return limits_low_; }
  const Vector& limits_high() const { return limits_high_; }

 private:
  std::vector<Joint> joints_;
  Vector limits_low_;
  Vector limits_high_;
};

enum class InvalidReason { kJointLimit, kHookRejected };

struct ValidityVerdict {
  bool valid = true;
  std::vector<std::size_t> violated_dims;
  std::optional<InvalidReason> reason;
};

// Extra physical-plausibility predicate (stands in for self-collision checks).
// An empty function accepts every pose.
using ValidityHook = std::function<bool(const Pose&)>;

ValidityVerdict validate_pose(const Pose& pose, const KinematicTree& tree,
                              const ValidityHook& hook = {});

LatentVector sample_uniform(const SearchSpace& space, RngStream& rng);

enum class Side { kUpper = 0, kLower = 1 };

const char* side_name(Side side);

struct ScheduleEntry {
  std::size_t joint;
  Side side;
  bool operator==(const ScheduleEntry&) const = default;
};

// Parent-to-child cycle over (joint, side): (0,up), (0,low), (1,up), ...
std::vector<ScheduleEntry> joint_schedule(const KinematicTree& tree);

}  // namespace examiner
