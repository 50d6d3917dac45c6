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

#include "examiner/phase2.hpp"

#include <algorithm>
#include <cmath>

#include "examiner/errors.hpp"
#include "examiner/json_io.hpp"
#include "examiner/parallel.hpp"

namespace examiner {

namespace {

// A bound within this distance of a joint limit counts as having reached it.
constexpr double kLimitTolerance = 1e-12;

// Largest phi with seed + phi <= limit (upper) or seed - phi >= limit (lower);
// guards against the sum rounding past the limit.
double max_phi(double seed, double limit, Side side) {
  double phi = side == Side::kUpper ? limit - seed : seed - limit;
  phi = std::max(phi, 0.0);
  if (side == Side::kUpper) {
    while (phi > 0 && seed + phi > limit) phi = std::nextafter(phi, 0.0);
  } else {
    while (phi > 0 && seed - phi < limit) phi = std::nextafter(phi, 0.0);
  }
  return phi;
}

}  // namespace

void Phase2Config::validate() const {
  if (samples_per_slab == 0) throw ConfigError("phase2: samples_per_slab must be >= 1");
  if (!(delta_min > 0) || !(delta_min <= delta_max)) {
    throw ConfigError("phase2: need 0 < delta_min <= delta_max");
  }
  if (!(delta_init > 0)) throw ConfigError("phase2: delta_init must be > 0");
  if (!(delta_slope > 0)) throw ConfigError("phase2: delta_slope must be > 0");
  if (!(adversarial_threshold > 0)) throw ConfigError("phase2: adversarial_threshold must be > 0");
  if (max_iterations == 0) throw ConfigError("phase2: max_iterations must be > 0");
}

nlohmann::json Phase2Config::to_json() const {
  return {{"samples_per_slab", samples_per_slab}, {"adversarial_threshold", adversarial_threshold},
          {"delta_init", delta_init},             {"delta_min", delta_min},
          {"delta_max", delta_max},               {"delta_slope", delta_slope},
          {"max_iterations", max_iterations},     {"reprobe_frozen", reprobe_frozen}};
}

Phase2Config Phase2Config::from_json(const nlohmann::json& j) {
  Phase2Config c;
  if (j.is_null()) return c;
  try {
    c.samples_per_slab = json_value_or(j, "samples_per_slab", c.samples_per_slab);
    c.adversarial_threshold = json_value_or(j, "adversarial_threshold", c.adversarial_threshold);
    c.delta_init = json_value_or(j, "delta_init", c.delta_init);
    c.delta_min = json_value_or(j, "delta_min", c.delta_min);
    c.delta_max = json_value_or(j, "delta_max", c.delta_max);
    c.delta_slope = json_value_or(j, "delta_slope", c.delta_slope);
    c.max_iterations = json_value_or(j, "max_iterations", c.max_iterations);
    c.reprobe_frozen = json_value_or(j, "reprobe_frozen", c.reprobe_frozen);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("phase2: ") + e.what());
  }
  c.validate();
  return c;
}

Vector FailureMode::box_low() const {
  Vector v(seed.angles);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] -= phi_low[i];
  return v;
}

Vector FailureMode::box_high() const {
  Vector v(seed.angles);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += phi_up[i];
  return v;
}

nlohmann::json FailureMode::to_json() const {
  nlohmann::json up = nlohmann::json::array();
  nlohmann::json low = nlohmann::json::array();
  for (const auto& f : frozen) {
    up.push_back(f[static_cast<int>(Side::kUpper)]);
    low.push_back(f[static_cast<int>(Side::kLower)]);
  }
  return {{"agent_id", agent_id},
          {"seed", seed.angles},
          {"phi_up", phi_up},
          {"phi_low", phi_low},
          {"iterations_used", iterations_used},
          {"frozen", {{"upper", up}, {"lower", low}}},
          {"complete", complete}};
}

FailureMode FailureMode::from_json(const nlohmann::json& j) {
  FailureMode m;
  try {
    m.agent_id = j.at("agent_id").get<std::size_t>();
    m.seed.angles = json_to_vector(j.at("seed"), "seed");
    m.phi_up = json_to_vector(j.at("phi_up"), "phi_up");
    m.phi_low = json_to_vector(j.at("phi_low"), "phi_low");
    m.iterations_used = j.at("iterations_used").get<std::size_t>();
    const auto up = j.at("frozen").at("upper").get<std::vector<bool>>();
    const auto low = j.at("frozen").at("lower").get<std::vector<bool>>();
    if (up.size() != low.size()) throw ConfigError("failure mode: frozen flags differ in length");
    for (std::size_t k = 0; k < up.size(); ++k) m.frozen.push_back({up[k], low[k]});
    m.complete = json_value_or(j, "complete", true);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("failure mode: ") + e.what());
  }
  if (m.phi_up.size() != m.seed.size() || m.phi_low.size() != m.seed.size()) {
    throw ConfigError("failure mode: bound vectors differ in length from the seed");
  }
  return m;
}

nlohmann::json ExpansionRecord::to_json() const {
  return {{"agent", agent},
          {"iter", iter},
          {"joint", joint},
          {"side", side_name(side)},
          {"delta", delta},
          {"slab_min_err", slab_min_err ? nlohmann::json(*slab_min_err) : nlohmann::json()},
          {"accepted", accepted},
          {"outcome", outcome}};
}

std::optional<std::vector<Pose>> slab_samples(const FailureMode& mode, std::size_t joint,
                                              Side side, double delta, std::size_t m,
                                              const KinematicTree& tree, RngStream& rng) {
  if (joint >= tree.num_joints()) throw ConfigError("slab_samples: joint out of range");
  if (!(delta > 0)) throw ConfigError("slab_samples: delta must be > 0");
  const auto& dims = tree.joint(joint).dims;
  const auto& lo_lim = tree.limits_low();
  const auto& hi_lim = tree.limits_high();

  std::array<double, 3> start{};
  bool any_room = false;
  for (std::size_t k = 0; k < 3; ++k) {
    const std::size_t d = dims[k];
    if (side == Side::kUpper) {
      start[k] = mode.seed.angles[d] + mode.phi_up[d];
      any_room |= start[k] < hi_lim[d] - kLimitTolerance;
    } else {
      start[k] = mode.seed.angles[d] - mode.phi_low[d];
      any_room |= start[k] > lo_lim[d] + kLimitTolerance;
    }
  }
  if (!any_room) return std::nullopt;

  std::vector<Pose> out(m, mode.seed);
  for (auto& pose : out) {
    for (std::size_t k = 0; k < 3; ++k) {
      const std::size_t d = dims[k];
      const double u = rng.uniform();
      pose.angles[d] = side == Side::kUpper ? std::min(start[k] + u * delta, hi_lim[d])
                                            : std::max(start[k] - u * delta, lo_lim[d]);
    }
  }
  return out;
}

double update_step_size(double min_err, double threshold, const Phase2Config& config) {
  // Written as (excess + delta_min / slope) / (1 / slope) so the default
  // schedule hits 0.005, 0.015 and 0.05 exactly in binary floating point.
  const double inv_slope = 1.0 / config.delta_slope;
  const double delta = (min_err - threshold + config.delta_min * inv_slope) / inv_slope;
  return std::clamp(delta, config.delta_min, config.delta_max);
}

FailureMode make_mode(const AdversarialSeed& seed, const KinematicTree& tree) {
  FailureMode mode;
  mode.agent_id = seed.agent_id;
  mode.seed = seed.pose_star;
  mode.phi_up.assign(tree.pose_dims(), 0.0);
  mode.phi_low.assign(tree.pose_dims(), 0.0);
  mode.frozen.assign(tree.num_joints(), {false, false});
  return mode;
}

ExpansionResult expand_boundary(const AdversarialSeed& seed, Sut& sut, const KinematicTree& tree,
                                const ValidityHook& hook, const Phase2Config& config,
                                RngStream& rng) {
  config.validate();
  if (!seed.succeeded) throw ConfigError("expand_boundary: seed did not succeed");
  if (!validate_pose(seed.pose_star, tree, hook).valid) {
    throw ConfigError("expand_boundary: seed pose of agent " + std::to_string(seed.agent_id) +
                      " is not a valid pose");
  }

  ExpansionResult result{make_mode(seed, tree), {}, std::nullopt};
  FailureMode& mode = result.mode;
  const auto schedule = joint_schedule(tree);
  // Sides whose slab left the joint limits; never retried.
  std::vector<std::array<bool, 2>> exhausted(tree.num_joints(), {false, false});
  double delta = config.delta_init;
  std::size_t cursor = 0;

  auto is_open = [&](const ScheduleEntry& e) {
    const int s = static_cast<int>(e.side);
    if (exhausted[e.joint][s]) return false;
    return config.reprobe_frozen || !mode.frozen[e.joint][s];
  };

  while (mode.iterations_used < config.max_iterations) {
    std::optional<ScheduleEntry> entry;
    for (std::size_t scanned = 0; scanned < schedule.size(); ++scanned) {
      const auto& e = schedule[cursor];
      cursor = (cursor + 1) % schedule.size();
      if (is_open(e)) {
        entry = e;
        break;
      }
    }
    if (!entry) break;
    const std::size_t j = entry->joint;
    const int s = static_cast<int>(entry->side);

    ExpansionRecord rec;
    rec.agent = mode.agent_id;
    rec.joint = j;
    rec.side = entry->side;
    rec.delta = delta;

    auto slab = slab_samples(mode, j, entry->side, delta, config.samples_per_slab, tree, rng);
    if (!slab) {
      exhausted[j][s] = true;
      mode.frozen[j][s] = true;
      rec.iter = mode.iterations_used;
      rec.outcome = "empty_slab";
      result.log.push_back(rec);
      continue;
    }

    ++mode.iterations_used;
    rec.iter = mode.iterations_used;

    std::vector<Pose> valid;
    valid.reserve(slab->size());
    for (auto& p : *slab) {
      if (validate_pose(p, tree, hook).valid) valid.push_back(std::move(p));
    }
    const bool all_valid = valid.size() == slab->size();

    if (!valid.empty()) {
      std::vector<EvalResult> results;
      try {
        results = sut.evaluate(valid);
      } catch (const ExaminerError& e) {
        mode.complete = false;
        result.error = e.what();
        break;
      }
      double min_err = results.front().err_3d;
      for (const auto& r : results) min_err = std::min(min_err, r.err_3d);
      rec.slab_min_err = min_err;
    }

    if (all_valid && rec.slab_min_err && *rec.slab_min_err > config.adversarial_threshold) {
      const auto& dims = tree.joint(j).dims;
      for (std::size_t d : dims) {
        if (entry->side == Side::kUpper) {
          mode.phi_up[d] = std::min(mode.phi_up[d] + delta,
                                    max_phi(mode.seed.angles[d], tree.limits_high()[d], Side::kUpper));
        } else {
          mode.phi_low[d] = std::min(mode.phi_low[d] + delta,
                                     max_phi(mode.seed.angles[d], tree.limits_low()[d], Side::kLower));
        }
      }
      mode.frozen[j][s] = false;
      delta = update_step_size(*rec.slab_min_err, config.adversarial_threshold, config);
      rec.accepted = true;
      rec.outcome = "accepted";
    } else {
      mode.frozen[j][s] = true;
      rec.outcome = all_valid ? "below_threshold" : "invalid_pose";
    }
    result.log.push_back(rec);
  }
  return result;
}

Phase2Result seed_to_mode_pipeline(const std::vector<AdversarialSeed>& seeds, SutPool& pool,
                                   const KinematicTree& tree, const ValidityHook& hook,
                                   const Phase2Config& config, std::uint64_t master_seed,
                                   std::size_t workers) {
  std::vector<const AdversarialSeed*> todo;
  for (const auto& s : seeds) {
    if (s.succeeded && !s.error) todo.push_back(&s);
  }
  std::vector<std::optional<ExpansionResult>> results(todo.size());
  std::vector<std::optional<std::string>> failures(todo.size());
  parallel_for(todo.size(), workers, [&](std::size_t idx, std::size_t worker) {
    RngStream rng(master_seed, StreamPurpose::kPhase2, todo[idx]->agent_id);
    try {
      results[idx] = expand_boundary(*todo[idx], pool.at(worker), tree, hook, config, rng);
    } catch (const ExaminerError& e) {
      failures[idx] = e.what();
    }
  });

  Phase2Result out;
  for (std::size_t idx = 0; idx < todo.size(); ++idx) {
    if (failures[idx]) {
      out.errors.emplace_back(todo[idx]->agent_id, *failures[idx]);
      continue;
    }
    auto& r = *results[idx];
    if (r.error) out.errors.emplace_back(todo[idx]->agent_id, *r.error);
    out.log.insert(out.log.end(), r.log.begin(), r.log.end());
    out.modes.push_back(std::move(r.mode));
  }
  return out;
}

}  // namespace examiner
