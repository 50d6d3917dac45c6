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

#include <cmath>

#include "doctest.h"
#include "examiner/errors.hpp"
#include "examiner/json_io.hpp"
#include "examiner/param_space.hpp"

using namespace examiner;

TEST_CASE("search space rejects inverted or mismatched bounds") {
  CHECK_THROWS_AS(SearchSpace({0.0, 1.0}, {1.0}), ConfigError);
  CHECK_THROWS_AS(SearchSpace({0.0, 1.0}, {1.0, 1.0}), ConfigError);
  const auto s = SearchSpace::cube(3, 2.0);
  CHECK(s.dims() == 3);
  CHECK(s.contains({-2.0, 0.0, 2.0}));
  CHECK_FALSE(s.contains({-2.1, 0.0, 0.0}));
  Vector x{5.0, -5.0, 0.3};
  s.clamp(x);
  CHECK(x == Vector{2.0, -2.0, 0.3});
}

TEST_CASE("search space json round trip and half-width form") {
  const auto s = SearchSpace({-1.0, 0.0}, {1.0, 0.5}, "latent");
  const auto back = SearchSpace::from_json(s.to_json());
  CHECK(back.lower() == s.lower());
  CHECK(back.upper() == s.upper());
  CHECK(back.label() == "latent");
  const auto cube = SearchSpace::from_json({{"dims", 4}, {"half_width", 1.5}});
  CHECK(cube.lower() == Vector(4, -1.5));
}

TEST_CASE("kinematic tree validation") {
  SUBCASE("parent after child") {
    std::vector<Joint> joints{{"a", 1, {0, 1, 2}}, {"b", -1, {3, 4, 5}}};
    CHECK_THROWS_AS(KinematicTree(joints, Vector(6, -1.0), Vector(6, 1.0)), ConfigError);
  }
  SUBCASE("dim owned twice") {
    std::vector<Joint> joints{{"a", -1, {0, 1, 2}}, {"b", 0, {2, 3, 4}}};
    CHECK_THROWS_AS(KinematicTree(joints, Vector(6, -1.0), Vector(6, 1.0)), ConfigError);
  }
  SUBCASE("empty limit interval") {
    std::vector<Joint> joints{{"a", -1, {0, 1, 2}}};
    CHECK_THROWS_AS(KinematicTree(joints, {0.0, 0.0, 0.0}, {1.0, 0.0, 1.0}), ConfigError);
  }
}

TEST_CASE("kinematic tree json accepts null and root parents") {
  const nlohmann::json j = {
      {"joints",
       {{{"name", "hip"}, {"parent", nullptr}, {"dims", {0, 1, 2}}},
        {{"name", "spine"}, {"parent", "root"}, {"dims", {3, 4, 5}}},
        {{"name", "knee"}, {"parent", 0}, {"dims", {6, 7, 8}}}}},
      {"limits_low", Vector(9, -1.0)},
      {"limits_high", Vector(9, 1.0)}};
  const auto tree = KinematicTree::from_json(j);
  CHECK(tree.num_joints() == 3);
  CHECK(tree.joint(1).parent == -1);
  CHECK(tree.joint(2).parent == 0);
  const auto again = KinematicTree::from_json(tree.to_json());
  CHECK(again.to_json() == tree.to_json());
}

TEST_CASE("validate_pose") {
  const auto tree = KinematicTree::chain(2, -1.0, 1.0);
  SUBCASE("midpoints are valid") {
    const auto v = validate_pose(Pose{Vector(6, 0.0)}, tree);
    CHECK(v.valid);
    CHECK(v.violated_dims.empty());
  }
  SUBCASE("one dim past the upper limit") {
    Pose p{Vector(6, 0.0)};
    p.angles[4] = 1.01;
    const auto v = validate_pose(p, tree);
    CHECK_FALSE(v.valid);
    CHECK(v.violated_dims == std::vector<std::size_t>{4});
    CHECK(v.reason == InvalidReason::kJointLimit);
  }
  SUBCASE("hook rejecting everything") {
    const auto v = validate_pose(Pose{Vector(6, 0.0)}, tree, [](const Pose&) { return false; });
    CHECK_FALSE(v.valid);
    CHECK(v.reason == InvalidReason::kHookRejected);
  }
  SUBCASE("limits are inclusive") {
    CHECK(validate_pose(Pose{Vector(6, 1.0)}, tree).valid);
  }
  SUBCASE("wrong length") { CHECK_THROWS_AS(validate_pose(Pose{Vector(5, 0.0)}, tree), ConfigError); }
  SUBCASE("nan is invalid") {
    Pose p{Vector(6, 0.0)};
    p.angles[0] = std::nan("");
    CHECK_FALSE(validate_pose(p, tree).valid);
  }
}

TEST_CASE("sample_uniform") {
  SUBCASE("near-point space") {
    RngStream rng(1);
    const auto z = sample_uniform(SearchSpace::cube(3, 0.5e-12), rng);
    for (double v : z.values) CHECK(std::abs(v) <= 1e-12);
  }
  SUBCASE("identical stream state gives identical draws") {
    RngStream a(42), b(42);
    const auto s = SearchSpace::cube(2, 2.0);
    CHECK(sample_uniform(s, a) == sample_uniform(s, b));
  }
  SUBCASE("per-dim mean near zero") {
    RngStream rng(3);
    const auto s = SearchSpace::cube(2, 2.0);
    double m0 = 0, m1 = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
      const auto z = sample_uniform(s, rng);
      CHECK_FALSE(!s.contains(z.values));
      m0 += z.values[0];
      m1 += z.values[1];
    }
    CHECK(std::abs(m0 / n) <= 0.02);
    CHECK(std::abs(m1 / n) <= 0.02);
  }
}

TEST_CASE("joint schedule") {
  const auto two = joint_schedule(KinematicTree::chain(2, -1, 1));
  const std::vector<ScheduleEntry> expected{
      {0, Side::kUpper}, {0, Side::kLower}, {1, Side::kUpper}, {1, Side::kLower}};
  CHECK(two == expected);
  CHECK(joint_schedule(KinematicTree::chain(1, -1, 1)).size() == 2);
  const auto smpl = KinematicTree::load(EXAMINER_DATA_DIR "/smpl21_tree.json");
  CHECK(smpl.num_joints() == 21);
  CHECK(smpl.pose_dims() == 63);
  CHECK(joint_schedule(smpl).size() == 42);
  CHECK(std::string(side_name(Side::kLower)) == "lower");
}
