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

#include "examiner/param_space.hpp"

#include <algorithm>
#include <cmath>

#include "examiner/errors.hpp"
#include "examiner/json_io.hpp"

namespace examiner {

SearchSpace::SearchSpace(Vector lower, Vector upper, std::string label)
    : lower_(std::move(lower)), upper_(std::move(upper)), label_(std::move(label)) {
  if (lower_.size() != upper_.size()) {
    throw ConfigError("search space: lower and upper differ in length");
  }
  if (lower_.empty()) throw ConfigError("search space: zero dimensions");
  for (std::size_t i = 0; i < lower_.size(); ++i) {
    if (!(lower_[i] < upper_[i])) {
      throw ConfigError("search space: lower >= upper at dim " + std::to_string(i));
    }
  }
}

SearchSpace SearchSpace::cube(std::size_t dims, double half_width, std::string label) {
  return SearchSpace(Vector(dims, -half_width), Vector(dims, half_width), std::move(label));
}

bool SearchSpace::contains(const Vector& x) const {
  if (x.size() != dims()) return false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < lower_[i] || x[i] > upper_[i]) return false;
  }
  return true;
}

void SearchSpace::clamp(Vector& x) const {
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lower_[i], upper_[i]);
}

nlohmann::json SearchSpace::to_json() const {
  return {{"lower", lower_}, {"upper", upper_}, {"label", label_}};
}

SearchSpace SearchSpace::from_json(const nlohmann::json& j) {
  if (j.contains("half_width")) {
    return cube(j.at("dims").get<std::size_t>(), j.at("half_width").get<double>(),
                json_value_or<std::string>(j, "label", ""));
  }
  return SearchSpace(json_to_vector(j.at("lower"), "lower"),
                     json_to_vector(j.at("upper"), "upper"),
                     json_value_or<std::string>(j, "label", ""));
}

KinematicTree::KinematicTree(std::vector<Joint> joints, Vector limits_low, Vector limits_high)
    : joints_(std::move(joints)),
      limits_low_(std::move(limits_low)),
      limits_high_(std::move(limits_high)) {
  if (joints_.empty()) throw ConfigError("kinematic tree: no joints");
  const std::size_t dims = 3 * joints_.size();
  if (limits_low_.size() != dims || limits_high_.size() != dims) {
    throw ConfigError("kinematic tree: limits must have 3 entries per joint");
  }
  std::vector<int> owner(dims, -1);
  for (std::size_t j = 0; j < joints_.size(); ++j) {
    const int parent = joints_[j].parent;
    if (parent >= static_cast<int>(j) || parent < -1) {
      throw ConfigError("kinematic tree: joint '" + joints_[j].name +
                        "' must have parent -1 or an earlier joint");
    }
    for (std::size_t d : joints_[j].dims) {
      if (d >= dims) throw ConfigError("kinematic tree: pose dim out of range");
      if (owner[d] != -1) {
        throw ConfigError("kinematic tree: pose dim " + std::to_string(d) +
                          " claimed by two joints");
      }
      owner[d] = static_cast<int>(j);
    }
  }
  for (std::size_t i = 0; i < dims; ++i) {
    if (!(limits_low_[i] < limits_high_[i])) {
      throw ConfigError("kinematic tree: limits_low >= limits_high at dim " +
                        std::to_string(i));
    }
  }
}

KinematicTree KinematicTree::chain(std::size_t count, double limit_low, double limit_high) {
  std::vector<Joint> joints;
  for (std::size_t j = 0; j < count; ++j) {
    joints.push_back({"joint" + std::to_string(j), static_cast<int>(j) - 1,
                      {3 * j, 3 * j + 1, 3 * j + 2}});
  }
  return KinematicTree(std::move(joints), Vector(3 * count, limit_low),
                       Vector(3 * count, limit_high));
}

KinematicTree KinematicTree::from_json(const nlohmann::json& j) {
  try {
    std::vector<Joint> joints;
    for (const auto& jj : j.at("joints")) {
      Joint joint;
      joint.name = json_value_or<std::string>(jj, "name", "");
      const auto& parent = jj.at("parent");
      joint.parent = parent.is_null() || (parent.is_string() && parent == "root")
                         ? -1
                         : parent.get<int>();
      const auto dims = jj.at("dims").get<std::vector<std::size_t>>();
      if (dims.size() != 3) throw ConfigError("kinematic tree: joints need 3 dims");
      joint.dims = {dims[0], dims[1], dims[2]};
      joints.push_back(std::move(joint));
    }
    return KinematicTree(std::move(joints), json_to_vector(j.at("limits_low"), "limits_low"),
                         json_to_vector(j.at("limits_high"), "limits_high"));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("kinematic tree: ") + e.what());
  }
}

KinematicTree KinematicTree::load(const std::filesystem::path& path) {
  return from_json(read_json_file(path));
}

nlohmann::json KinematicTree::to_json() const {
  nlohmann::json joints = nlohmann::json::array();
  for (const auto& j : joints_) {
    joints.push_back({{"name", j.name},
                      {"parent", j.parent},
                      {"dims", {j.dims[0], j.dims[1], j.dims[2]}}});
  }
  return {{"joints", joints}, {"limits_low", limits_low_}, {"limits_high", limits_high_}};
}

ValidityVerdict validate_pose(const Pose& pose, const KinematicTree& tree,
                              const ValidityHook& hook) {
  if (pose.size() != tree.pose_dims()) {
    throw ConfigError("validate_pose: pose has " + std::to_string(pose.size()) +
                      " dims, tree expects " + std::to_string(tree.pose_dims()));
  }
  ValidityVerdict verdict;
  const auto& lo = tree.limits_low();
  const auto& hi = tree.limits_high();
  for (std::size_t i = 0; i < pose.size(); ++i) {
    const double a = pose.angles[i];
    if (!std::isfinite(a) || a < lo[i] || a > hi[i]) verdict.violated_dims.push_back(i);
  }
  if (!verdict.violated_dims.empty()) {
    verdict.valid = false;
    verdict.reason = InvalidReason::kJointLimit;
  } else if (hook && !hook(pose)) {
    verdict.valid = false;
    verdict.reason = InvalidReason::kHookRejected;
  }
  return verdict;
}

LatentVector sample_uniform(const SearchSpace& space, RngStream& rng) {
  LatentVector z;
  z.values.resize(space.dims());
  for (std::size_t i = 0; i < space.dims(); ++i) {
    z.values[i] = std::min(rng.uniform(space.lower()[i], space.upper()[i]), space.upper()[i]);
  }
  return z;
}

const char* side_name(Side side) { return side == Side::kUpper ? "upper" : "lower"; }

std::vector<ScheduleEntry> joint_schedule(const KinematicTree& tree) {
  std::vector<ScheduleEntry> out;
  out.reserve(2 * tree.num_joints());
  for (std::size_t j = 0; j < tree.num_joints(); ++j) {
    out.push_back({j, Side::kUpper});
    out.push_back({j, Side::kLower});
  }
  return out;
}

}  // namespace examiner
