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

#include "examiner/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "examiner/errors.hpp"
#include "examiner/parallel.hpp"

namespace examiner {

nlohmann::json ModeStats::to_json() const {
  return {{"pnae", pnae},
          {"min_mpjpe", min_mpjpe},
          {"mean_mpjpe", mean_mpjpe},
          {"max_mpjpe", max_mpjpe},
          {"median_mpjpe", median_mpjpe},
          {"samples_used", samples_used}};
}

double region_size(std::span<const FailureMode> modes) {
  if (modes.empty()) throw MetricError("region size is undefined without failure modes");
  double total = 0.0;
  for (const auto& m : modes) {
    double sq = 0.0;
    for (std::size_t i = 0; i < m.phi_up.size(); ++i) {
      const double w = m.phi_up[i] + m.phi_low[i];
      sq += w * w;
    }
    total += std::sqrt(sq);
  }
  return total / static_cast<double>(modes.size());
}

std::vector<Pose> sample_mode(const FailureMode& mode, std::size_t count,
                              const KinematicTree& tree, const ValidityHook& hook,
                              RngStream& rng) {
  if (count == 0) throw ConfigError("sample_mode: count must be >= 1");
  const bool degenerate =
      std::all_of(mode.phi_up.begin(), mode.phi_up.end(), [](double v) { return v == 0.0; }) &&
      std::all_of(mode.phi_low.begin(), mode.phi_low.end(), [](double v) { return v == 0.0; });
  if (degenerate) return std::vector<Pose>(count, mode.seed);

  const Vector lo = mode.box_low();
  const Vector hi = mode.box_high();
  const std::size_t budget = 100 * count;
  std::vector<Pose> out;
  out.reserve(count);
  for (std::size_t draws = 0; out.size() < count; ++draws) {
    if (draws >= budget) {
      throw SamplingError("sample_mode: only " + std::to_string(out.size()) + " of " +
                          std::to_string(count) + " valid samples after " +
                          std::to_string(budget) + " draws");
    }
    Pose p{Vector(lo.size())};
    for (std::size_t i = 0; i < lo.size(); ++i) {
      p.angles[i] = lo[i] == hi[i] ? lo[i] : std::min(rng.uniform(lo[i], hi[i]), hi[i]);
    }
    if (validate_pose(p, tree, hook).valid) out.push_back(std::move(p));
  }
  return out;
}

ModeStats stats_from_errors(std::span<const double> err_3d, double threshold) {
  if (err_3d.empty()) throw MetricError("mode stats need at least one sample");
  std::vector<double> sorted(err_3d.begin(), err_3d.end());
  std::sort(sorted.begin(), sorted.end());
  ModeStats s;
  s.samples_used = sorted.size();
  s.min_mpjpe = sorted.front();
  s.max_mpjpe = sorted.back();
  double sum = 0.0;
  std::size_t below = 0;
  for (double e : err_3d) {
    sum += e;
    if (e < threshold) ++below;
  }
  s.mean_mpjpe = sum / static_cast<double>(sorted.size());
  // Keep the mean inside [min, max] despite rounding.
  s.mean_mpjpe = std::clamp(s.mean_mpjpe, s.min_mpjpe, s.max_mpjpe);
  const std::size_t n = sorted.size();
  s.median_mpjpe = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  s.pnae = static_cast<double>(below) / static_cast<double>(n);
  return s;
}

ModeEvaluation evaluate_mode(const FailureMode& mode, Sut& sut, std::size_t count,
                             double threshold, const KinematicTree& tree,
                             const ValidityHook& hook, RngStream& rng) {
  ModeEvaluation ev;
  ev.mode_id = mode.agent_id;
  ev.poses = sample_mode(mode, count, tree, hook, rng);
  ev.results = sut.evaluate(ev.poses);
  std::vector<double> e3;
  e3.reserve(ev.results.size());
  for (const auto& r : ev.results) e3.push_back(r.err_3d);
  ev.stats = stats_from_errors(e3, threshold);
  return ev;
}

ModeStats mode_stats(const FailureMode& mode, Sut& sut, std::size_t count, double threshold,
                     const KinematicTree& tree, const ValidityHook& hook, RngStream& rng) {
  return evaluate_mode(mode, sut, count, threshold, tree, hook, rng).stats;
}

double success_rate(std::span<const AdversarialSeed> seeds) {
  std::size_t errored = 0;
  std::size_t succeeded = 0;
  for (const auto& s : seeds) {
    if (s.error) {
      ++errored;
    } else if (s.succeeded) {
      ++succeeded;
    }
  }
  if (seeds.size() == errored) throw MetricError("success rate is undefined: every agent errored");
  return static_cast<double>(succeeded) / static_cast<double>(seeds.size() - errored);
}

namespace {

void fill_aggregate(RobustnessReport& report) {
  std::vector<double> pooled;
  for (const auto& m : report.modes) {
    for (const auto& r : m.results) pooled.push_back(r.err_3d);
  }
  if (pooled.empty()) {
    report.aggregate.reset();
  } else {
    report.aggregate = stats_from_errors(pooled, report.adversarial_threshold);
  }
}

}  // namespace

RobustnessReport robustness_report(std::span<const AdversarialSeed> seeds,
                                   std::span<const FailureMode> modes, SutPool& pool,
                                   const KinematicTree& tree, const ValidityHook& hook,
                                   const ReportSettings& settings) {
  RobustnessReport report;
  report.fingerprint = settings.fingerprint;
  report.master_seed = settings.master_seed;
  report.adversarial_threshold = settings.adversarial_threshold;
  report.num_agents = seeds.size();
  for (const auto& s : seeds) {
    if (s.error) {
      ++report.num_errored;
    } else if (s.succeeded) {
      ++report.num_succeeded;
    }
  }
  report.success_rate = success_rate(seeds);
  if (modes.empty()) return report;

  report.region_size = region_size(modes);
  report.modes.resize(modes.size());
  parallel_for(modes.size(), settings.workers, [&](std::size_t idx, std::size_t worker) {
    RngStream rng(settings.master_seed, StreamPurpose::kMetrics, modes[idx].agent_id);
    report.modes[idx] = evaluate_mode(modes[idx], pool.at(worker), settings.samples_per_mode,
                                      settings.adversarial_threshold, tree, hook, rng);
  });
  fill_aggregate(report);
  return report;
}

RobustnessReport reevaluate_report(const RobustnessReport& report, SutPool& pool,
                                   std::size_t workers) {
  RobustnessReport out = report;
  parallel_for(out.modes.size(), workers, [&](std::size_t idx, std::size_t worker) {
    auto& m = out.modes[idx];
    m.results = pool.at(worker).evaluate(m.poses);
    std::vector<double> e3;
    for (const auto& r : m.results) e3.push_back(r.err_3d);
    m.stats = stats_from_errors(e3, out.adversarial_threshold);
  });
  fill_aggregate(out);
  return out;
}

nlohmann::json RobustnessReport::to_json() const {
  nlohmann::json modes_json = nlohmann::json::array();
  for (const auto& m : modes) modes_json.push_back({{"mode_id", m.mode_id}, {"stats", m.stats.to_json()}});
  return {{"fingerprint", fingerprint},
          {"master_seed", master_seed},
          {"adversarial_threshold", adversarial_threshold},
          {"success_rate", success_rate},
          {"num_agents", num_agents},
          {"num_succeeded", num_succeeded},
          {"num_errored", num_errored},
          {"region_size", region_size ? nlohmann::json(*region_size) : nlohmann::json()},
          {"modes", modes_json},
          {"aggregate", aggregate ? aggregate->to_json() : nlohmann::json()}};
}

std::vector<nlohmann::json> RobustnessReport::sample_lines() const {
  std::vector<nlohmann::json> lines;
  for (const auto& m : modes) {
    for (std::size_t k = 0; k < m.poses.size(); ++k) {
      lines.push_back({{"mode", m.mode_id},
                       {"pose", m.poses[k].angles},
                       {"err2d", m.results[k].err_2d},
                       {"err3d", m.results[k].err_3d}});
    }
  }
  return lines;
}

}  // namespace examiner
