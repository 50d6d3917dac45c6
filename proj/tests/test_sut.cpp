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
#include "examiner/landscape.hpp"
#include "examiner/sut.hpp"

using namespace examiner;

namespace {
SyntheticLandscape single_bump(bool trainable = false) {
  return SyntheticLandscape(20.0, {Bump{{0.0, 0.0, 0.0}, 280.0, 0.5}}, 1.0, trainable, 0.5);
}
}  // namespace

TEST_CASE("landscape values") {
  const auto l = single_bump();
  CHECK(l.err_3d(Pose{{0, 0, 0}}) == 300.0);
  CHECK(l.err_3d(Pose{{5.0, 0, 0}}) == doctest::Approx(20.0).epsilon(1e-8));
  const SyntheticLandscape ratio(100.0, {}, 0.8);
  const auto r = ratio.evaluate(Pose{{0.1, 0.2}});
  CHECK(r.err_3d == 100.0);
  CHECK(r.err_2d == doctest::Approx(80.0));
  CHECK_THROWS_AS(l.err_3d(Pose{{0, 0}}), ConfigError);
}

TEST_CASE("landscape validation") {
  CHECK_THROWS_AS(SyntheticLandscape(0, {Bump{{0, 0}, -1.0, 0.5}}), ConfigError);
  CHECK_THROWS_AS(SyntheticLandscape(0, {Bump{{0, 0}, 1.0, 0.0}}), ConfigError);
  CHECK_THROWS_AS(SyntheticLandscape(0, {Bump{{0, 0}, 1.0, 0.5}, Bump{{0}, 1.0, 0.5}}), ConfigError);
}

TEST_CASE("threshold radius closed form") {
  CHECK(bump_threshold_radius(0.0, 300.0, 0.4, 90.0) ==
        doctest::Approx(0.4 * std::sqrt(2.0 * std::log(300.0 / 90.0))));
  CHECK(bump_threshold_radius(20.0, 50.0, 0.4, 90.0) == 0.0);
  // The superlevel boundary sits exactly at the threshold.
  const double r = bump_threshold_radius(20.0, 280.0, 0.3, 90.0);
  const SyntheticLandscape l(20.0, {Bump{{0.0, 0.0}, 280.0, 0.3}});
  CHECK(l.err_3d(Pose{{r, 0.0}}) == doctest::Approx(90.0).epsilon(1e-12));
}

TEST_CASE("in-process SUT identity is content-derived") {
  InProcessSut a(single_bump()), b(single_bump());
  CHECK(a.name() == b.name());
  CHECK(a.name().rfind("synthetic-landscape:", 0) == 0);
  InProcessSut c(SyntheticLandscape(21.0, {Bump{{0.0, 0.0, 0.0}, 280.0, 0.5}}));
  CHECK(a.name() != c.name());
}

TEST_CASE("train hint") {
  SUBCASE("non-trainable") {
    InProcessSut s(single_bump(false));
    const std::vector<Pose> poses{Pose{{0, 0, 0}}};
    CHECK(s.train(poses, 0.05) == TrainOutcome::kUnsupported);
  }
  SUBCASE("samples at a bump center halve it") {
    InProcessSut s(single_bump(true));
    const std::vector<Pose> poses{Pose{{0, 0, 0}}, Pose{{0.01, 0, 0}}};
    const double before = s.evaluate(poses).at(0).err_3d;
    CHECK(s.train(poses, 0.05) == TrainOutcome::kTrained);
    CHECK(s.landscape().bumps().at(0).amplitude == 140.0);  // once per call, not per sample
    CHECK(s.evaluate(poses).at(0).err_3d < before);
  }
  SUBCASE("far samples leave the bump alone") {
    InProcessSut s(single_bump(true));
    const std::vector<Pose> poses{Pose{{3, 3, 3}}};
    CHECK(s.train(poses, 0.05) == TrainOutcome::kTrained);
    CHECK(s.landscape().bumps().at(0).amplitude == 280.0);
  }
  SUBCASE("empty samples") {
    InProcessSut s(single_bump(true));
    CHECK(s.train({}, 0.05) == TrainOutcome::kTrained);
    CHECK(s.landscape().to_json() == single_bump(true).to_json());
  }
}

TEST_CASE("pool broadcasts training to every handle") {
  auto pool = SutPool::create([] { return std::make_unique<InProcessSut>(single_bump(true)); }, 3);
  CHECK(pool.size() == 3);
  const std::vector<Pose> poses{Pose{{0, 0, 0}}};
  CHECK(pool.train(poses, 0.05) == TrainOutcome::kTrained);
  for (std::size_t w = 0; w < 3; ++w) CHECK(pool.at(w).evaluate(poses).at(0).err_3d == 160.0);
  CHECK(&pool.at(4) == &pool.at(1));
}

TEST_CASE("landscape json round trip") {
  const auto l = SyntheticLandscape(5.0, {Bump{{1, 2}, 3, 0.2}}, 0.7, true, 0.25, 1.5);
  const auto back = SyntheticLandscape::from_json(l.to_json());
  CHECK(back.to_json() == l.to_json());
  CHECK(back.identity() == l.identity());
  CHECK_THROWS_AS(SyntheticLandscape::from_json({{"bumps", nlohmann::json::array()}}), ConfigError);
}
