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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <numeric>

#include "doctest.h"
#include "examiner/errors.hpp"
#include "examiner/json_io.hpp"
#include "examiner/metrics.hpp"
#include "examiner/run_directory.hpp"

using namespace examiner;

namespace {

FailureMode box_mode(Vector seed, double up, double low, std::size_t id = 0) {
  FailureMode m;
  m.agent_id = id;
  m.phi_up.assign(seed.size(), up);
  m.phi_low.assign(seed.size(), low);
  m.seed = Pose{std::move(seed)};
  return m;
}

AdversarialSeed seed(std::size_t id, bool ok, bool errored = false) {
  AdversarialSeed s;
  s.agent_id = id;
  s.succeeded = ok;
  if (errored) s.error = "failed";
  return s;
}

}  // namespace

TEST_CASE("region size") {
  CHECK(region_size(std::vector<FailureMode>{box_mode(Vector(4, 0.0), 0, 0)}) == 0.0);
  CHECK(region_size(std::vector<FailureMode>{box_mode(Vector(63, 0.0), 0.5, 0.5)}) ==
        doctest::Approx(std::sqrt(63.0)).epsilon(1e-12));
  // Norms 2 and 4.
  const std::vector<FailureMode> two{box_mode(Vector(4, 0.0), 0.5, 0.5), box_mode(Vector(4, 0.0), 1.0, 1.0)};
  CHECK(region_size(two) == doctest::Approx(3.0));
  CHECK_THROWS_AS(region_size(std::vector<FailureMode>{}), MetricError);
}

TEST_CASE("sample_mode") {
  const auto tree = KinematicTree::chain(1, -3, 3);
  RngStream rng(1);
  SUBCASE("zero box returns the seed") {
    const auto s = sample_mode(box_mode({0.1, 0.2, 0.3}, 0, 0), 5, tree, {}, rng);
    CHECK(s.size() == 5);
    for (const auto& p : s) CHECK(p.angles == Vector{0.1, 0.2, 0.3});
  }
  SUBCASE("uniform mean converges to the seed") {
    const auto one = KinematicTree::chain(1, -3, 3);
    const auto s = sample_mode(box_mode({0.5, 0.0, 0.0}, 1.0, 1.0), 100000, one, {}, rng);
    double mean = 0;
    for (const auto& p : s) {
      CHECK_FALSE((p.angles[0] < -0.5 || p.angles[0] > 1.5));
      mean += p.angles[0];
    }
    CHECK(std::abs(mean / 1e5 - 0.5) <= 0.02);
  }
  SUBCASE("hook rejecting everything exhausts the budget") {
    CHECK_THROWS_AS(sample_mode(box_mode({0, 0, 0}, 0.1, 0.1), 10, tree, [](const Pose&) { return false; }, rng),
                    SamplingError);
  }
}

TEST_CASE("stats from errors") {
  const std::vector<double> e{100, 80, 120, 95};
  const auto s = stats_from_errors(e, 90);
  CHECK(s.pnae == 0.25);
  CHECK(s.min_mpjpe == 80);
  CHECK(s.max_mpjpe == 120);
  CHECK(s.mean_mpjpe == 98.75);
  CHECK(s.median_mpjpe == 97.5);
  CHECK(s.samples_used == 4);
  const std::vector<double> at_t{90.0};
  CHECK(stats_from_errors(at_t, 90).pnae == 0.0);  // strictly below T counts
  CHECK_THROWS_AS(stats_from_errors(std::vector<double>{}, 90), MetricError);
}

TEST_CASE("mode stats on constant landscapes") {
  const auto tree = KinematicTree::chain(1, -3, 3);
  RngStream rng(2);
  InProcessSut high(SyntheticLandscape::constant(180));
  const auto s = mode_stats(box_mode({0, 0, 0}, 0.5, 0.5), high, 50, 90, tree, {}, rng);
  CHECK(s.pnae == 0.0);
  CHECK(s.min_mpjpe == 180);
  CHECK(s.max_mpjpe == 180);
  CHECK(s.mean_mpjpe == 180);
  CHECK(s.median_mpjpe == 180);
  InProcessSut low(SyntheticLandscape::constant(45));
  CHECK(mode_stats(box_mode({0, 0, 0}, 0.5, 0.5), low, 50, 90, tree, {}, rng).pnae == 1.0);
}

TEST_CASE("pnae matches a dense grid oracle on the analytic box") {
  const double w = 0.4, r_star = w * std::sqrt(2.0 * std::log(300.0 / 90.0));
  const auto tree = KinematicTree::chain(1, -3, 3);
  InProcessSut sut(SyntheticLandscape(0.0, {Bump{{0, 0, 0}, 300.0, w}}));
  const auto mode = box_mode({0, 0, 0}, r_star, r_star);
  const int n = 100;
  int below = 0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        const double x = -r_star + 2 * r_star * (a + 0.5) / n;
        const double y = -r_star + 2 * r_star * (b + 0.5) / n;
        const double z = -r_star + 2 * r_star * (c + 0.5) / n;
        below += 300.0 * std::exp(-(x * x + y * y + z * z) / (2 * w * w)) < 90.0;
      }
  const double grid = below / 1e6;
  RngStream rng(3);
  const auto s = mode_stats(mode, sut, 10000, 90, tree, {}, rng);
  CHECK(std::abs(s.pnae - grid) <= 0.03);
  CHECK(grid > 0.3);  // the box corners stick out of the ball
}

TEST_CASE("success rate") {
  std::vector<AdversarialSeed> s;
  for (std::size_t i = 0; i < 8; ++i) s.push_back(seed(i, i < 6));
  CHECK(success_rate(s) == 0.75);
  for (auto& x : s) x.succeeded = false;
  CHECK(success_rate(s) == 0.0);
  for (auto& x : s) x.succeeded = true;
  CHECK(success_rate(s) == 1.0);
  s[0] = seed(0, false, true);  // errored agents leave the denominator
  CHECK(success_rate(s) == 1.0);
  for (auto& x : s) x = seed(x.agent_id, false, true);
  CHECK_THROWS_AS(success_rate(s), MetricError);
}

TEST_CASE("report without modes") {
  const auto tree = KinematicTree::chain(1, -3, 3);
  auto pool = SutPool::create([] { return std::make_unique<InProcessSut>(SyntheticLandscape::constant(20)); }, 1);
  const std::vector<AdversarialSeed> seeds{seed(0, false), seed(1, false)};
  const auto r = robustness_report(seeds, {}, pool, tree, {}, ReportSettings{});
  CHECK(r.success_rate == 0.0);
  CHECK_FALSE(r.region_size);
  CHECK_FALSE(r.aggregate);
  CHECK(r.to_json().at("aggregate").is_null());
}

TEST_CASE("report matches a recomputation from the persisted samples") {
  const auto tree = KinematicTree::chain(1, -3, 3);
  std::vector<Bump> bumps;
  for (double x : {-1.0, 1.0})
    for (double y : {-1.0, 1.0}) bumps.push_back(Bump{{x, y, 0}, 280, 0.3});
  const SyntheticLandscape land(20.0, bumps);
  auto pool = SutPool::create([land] { return std::make_unique<InProcessSut>(land); }, 2);
  const std::vector<FailureMode> modes{box_mode({1, 1, 0}, 0.2, 0.15, 0), box_mode({-1, 1, 0}, 0.3, 0.1, 2),
                                       box_mode({1, -1, 0}, 0.05, 0.25, 3)};
  std::vector<AdversarialSeed> seeds{seed(0, true), seed(1, false), seed(2, true), seed(3, true)};
  ReportSettings settings;
  settings.samples_per_mode = 64;
  settings.master_seed = 17;
  settings.workers = 2;
  const auto report = robustness_report(seeds, modes, pool, tree, {}, settings);

  const auto dir = std::filesystem::temp_directory_path() / "examiner_metrics_recompute";
  std::filesystem::remove_all(dir);
  const RunDirectory rd(dir);
  rd.write_jsonl(RunDirectory::kMetricsSamples, {{"fingerprint", "x"}}, report.sample_lines());
  rd.write_json(RunDirectory::kReport, report.to_json());

  // Independent recomputation: errors from the landscape formula, stats by hand.
  std::map<std::size_t, std::vector<double>> per_mode;
  for (const auto& l : read_jsonl_file(rd.path(RunDirectory::kMetricsSamples))) {
    if (l.value("type", "") == "header") continue;
    const auto p = l.at("pose").get<std::vector<double>>();
    double e = 20.0;
    for (const auto& b : bumps) {
      double sq = 0;
      for (int k = 0; k < 3; ++k) sq += (p[k] - b.center[k]) * (p[k] - b.center[k]);
      e += b.amplitude * std::exp(-sq / (2 * b.width * b.width));
    }
    CHECK(l.at("err3d").get<double>() == doctest::Approx(e).epsilon(1e-12));
    per_mode[l.at("mode").get<std::size_t>()].push_back(l.at("err3d").get<double>());
  }
  const auto stored = read_json_file(rd.path(RunDirectory::kReport));
  REQUIRE(stored.at("modes").size() == 3);
  std::vector<double> all;
  for (const auto& m : stored.at("modes")) {
    auto v = per_mode.at(m.at("mode_id").get<std::size_t>());
    all.insert(all.end(), v.begin(), v.end());
    std::sort(v.begin(), v.end());
    const double below = static_cast<double>(std::count_if(v.begin(), v.end(), [](double e) { return e < 90; }));
    const auto& st = m.at("stats");
    CHECK(st.at("pnae").get<double>() == doctest::Approx(below / v.size()));
    CHECK(st.at("min_mpjpe").get<double>() == v.front());
    CHECK(st.at("max_mpjpe").get<double>() == v.back());
    CHECK(st.at("median_mpjpe").get<double>() == doctest::Approx((v[31] + v[32]) / 2));
    CHECK(st.at("mean_mpjpe").get<double>() ==
          doctest::Approx(std::accumulate(v.begin(), v.end(), 0.0) / v.size()));
  }
  CHECK(stored.at("aggregate").at("samples_used") == all.size());
  CHECK(stored.at("success_rate").get<double>() == 0.75);
  const double rs = (std::sqrt(3 * 0.35 * 0.35) + std::sqrt(3 * 0.4 * 0.4) + std::sqrt(3 * 0.3 * 0.3)) / 3;
  CHECK(stored.at("region_size").get<double>() == doctest::Approx(rs));

  // Deterministic rerun.
  const auto again = robustness_report(seeds, modes, pool, tree, {}, settings);
  CHECK(again.to_json() == report.to_json());
  CHECK(again.sample_lines() == report.sample_lines());
  std::filesystem::remove_all(dir);
}
