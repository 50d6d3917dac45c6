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

#include "examiner/curriculum.hpp"

#include <cmath>
#include <numbers>

#include "examiner/errors.hpp"
#include "examiner/json_io.hpp"
#include "examiner/parallel.hpp"

namespace examiner {

namespace {

// Global-rotation limits are (Y, X, Z) in radians.
nlohmann::json preset_nuisance(const char* clothing, const char* background, double y, double x,
                               double z) {
  return {{"clothing", clothing},
          {"background", background},
          {"global_rotation_limits_yxz", {y, x, z}}};
}

// Draws `count` indices from [0, size): without replacement when possible.
std::vector<std::size_t> draw_indices(std::size_t size, std::size_t count, RngStream& rng) {
  std::vector<std::size_t> out;
  out.reserve(count);
  if (count <= size) {
    std::vector<std::size_t> pool(size);
    for (std::size_t i = 0; i < size; ++i) pool[i] = i;
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.below(size - i));
      std::swap(pool[i], pool[j]);
      out.push_back(pool[i]);
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) out.push_back(static_cast<std::size_t>(rng.below(size)));
  }
  return out;
}

}  // namespace

DifficultyPreset named_preset(const std::string& name) {
  constexpr double pi = std::numbers::pi;
  if (name == "easy") {
    return {"easy", 80.0, 1.5, preset_nuisance("easy_top5", "easy_top10", 0.0, 0.05 * pi, 0.0)};
  }
  if (name == "standard") {
    return {"standard", 90.0, 2.0,
            preset_nuisance("id1", "plain_white", 0.02 * pi, 0.02 * pi, 0.02 * pi)};
  }
  if (name == "hard") {
    return {"hard", 90.0, 3.0,
            preset_nuisance("hard_12", "hard_top5", 0.4 * pi, 0.05 * pi, 0.05 * pi)};
  }
  throw ConfigError("unknown difficulty preset '" + name + "'");
}

nlohmann::json DifficultyPreset::to_json() const {
  return {{"name", name},
          {"adversarial_threshold", adversarial_threshold},
          {"policy_half_width", policy_half_width},
          {"nuisance", nuisance}};
}

DifficultyPreset DifficultyPreset::from_json(const nlohmann::json& j) {
  if (j.is_string()) return named_preset(j.get<std::string>());
  try {
    DifficultyPreset p;
    p.name = json_value_or<std::string>(j, "name", "custom");
    if (p.name != "custom") {
      p = named_preset(p.name);
    }
    p.adversarial_threshold = json_value_or(j, "adversarial_threshold", p.adversarial_threshold);
    p.policy_half_width = json_value_or(j, "policy_half_width", p.policy_half_width);
    if (j.contains("nuisance")) p.nuisance = j.at("nuisance");
    if (!(p.adversarial_threshold > 0) || !(p.policy_half_width > 0)) {
      throw ConfigError("preset: threshold and half width must be > 0");
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("preset: ") + e.what());
  }
}

ExaminerSetup apply_preset(const ExaminerSetup& base, const DifficultyPreset& preset) {
  ExaminerSetup s = base;
  s.phase1.adversarial_threshold = preset.adversarial_threshold;
  s.phase2.adversarial_threshold = preset.adversarial_threshold;
  s.phase1.policy_bounds =
      SearchSpace::cube(base.decoder.input_dims(), preset.policy_half_width, preset.name);
  return s;
}

nlohmann::json AdversaryRecord::to_json() const {
  return {{"pose", pose.angles},
          {"overrides", overrides},
          {"mode", mode_id},
          {"err3d", err_3d},
          {"loop", loop}};
}

AdversaryRecord AdversaryRecord::from_json(const nlohmann::json& j) {
  AdversaryRecord r;
  r.pose.angles = json_to_vector(j.at("pose"), "pose");
  r.overrides = j.value("overrides", nlohmann::json::object());
  r.mode_id = j.at("mode").get<std::size_t>();
  r.err_3d = j.at("err3d").get<double>();
  r.loop = j.value("loop", std::size_t{0});
  return r;
}

void AdversarySet::append(std::span<const AdversaryRecord> records) {
  records_.insert(records_.end(), records.begin(), records.end());
}

std::vector<AdversaryRecord> build_adversary_set(std::span<const FailureMode> modes,
                                                 std::size_t m, SutPool& pool,
                                                 const KinematicTree& tree,
                                                 const ValidityHook& hook,
                                                 std::uint64_t master_seed,
                                                 std::size_t workers) {
  if (modes.empty()) throw ConfigError("build_adversary_set: no failure modes");
  std::vector<std::vector<AdversaryRecord>> per_mode(modes.size());
  parallel_for(modes.size(), workers, [&](std::size_t idx, std::size_t worker) {
    const auto& mode = modes[idx];
    RngStream rng(master_seed, StreamPurpose::kAdversarySet, mode.agent_id);
    const auto poses = sample_mode(mode, m, tree, hook, rng);
    const auto results = pool.at(worker).evaluate(poses);
    auto& out = per_mode[idx];
    out.reserve(poses.size());
    for (std::size_t k = 0; k < poses.size(); ++k) {
      AdversaryRecord r;
      r.pose = poses[k];
      r.mode_id = mode.agent_id;
      r.err_3d = results[k].err_3d;
      out.push_back(std::move(r));
    }
  });
  std::vector<AdversaryRecord> all;
  for (auto& v : per_mode) all.insert(all.end(), v.begin(), v.end());
  return all;
}

MixIndices epsilon_mix(std::size_t adversary_size, std::size_t base_size, double epsilon,
                       std::size_t batch_size, RngStream& rng) {
  if (!(epsilon >= 0 && epsilon <= 1)) throw ConfigError("epsilon_mix: epsilon must be in [0, 1]");
  if (batch_size == 0) throw ConfigError("epsilon_mix: batch_size must be >= 1");
  const auto from_adversary =
      static_cast<std::size_t>(std::llround(epsilon * static_cast<double>(batch_size)));
  const std::size_t from_base = batch_size - from_adversary;
  if (from_adversary > 0 && adversary_size == 0) {
    throw ConfigError("epsilon_mix: epsilon > 0 but the adversary set is empty");
  }
  if (from_base > 0 && base_size == 0) {
    throw ConfigError("epsilon_mix: base share > 0 but the base set is empty");
  }
  MixIndices mix;
  mix.adversary = draw_indices(adversary_size, from_adversary, rng);
  mix.base = draw_indices(base_size, from_base, rng);
  return mix;
}

CurriculumConfig CurriculumConfig::defaults() {
  CurriculumConfig c;
  for (const char* name : {"easy", "easy", "standard", "standard", "hard"}) {
    c.presets.push_back(named_preset(name));
  }
  return c;
}

void CurriculumConfig::validate() const {
  if (presets.empty()) throw ConfigError("curriculum: preset list is empty");
  if (!(epsilon >= 0 && epsilon <= 1)) throw ConfigError("curriculum: epsilon must be in [0, 1]");
  if (samples_per_mode == 0) throw ConfigError("curriculum: samples_per_mode must be >= 1");
  if (batch_size == 0) throw ConfigError("curriculum: batch_size must be >= 1");
  if (!(lr_discount > 0)) throw ConfigError("curriculum: lr_discount must be > 0");
}

nlohmann::json CurriculumConfig::to_json() const {
  nlohmann::json ps = nlohmann::json::array();
  for (const auto& p : presets) ps.push_back(p.to_json());
  return {{"presets", ps},          {"loops", loops},
          {"samples_per_mode", samples_per_mode}, {"epsilon", epsilon},
          {"lr_discount", lr_discount}, {"batch_size", batch_size}};
}

CurriculumConfig CurriculumConfig::from_json(const nlohmann::json& j) {
  CurriculumConfig c = defaults();
  try {
    if (j.contains("presets")) {
      c.presets.clear();
      for (const auto& p : j.at("presets")) c.presets.push_back(DifficultyPreset::from_json(p));
    }
    c.loops = json_value_or(j, "loops", c.loops);
    c.samples_per_mode = json_value_or(j, "samples_per_mode", c.samples_per_mode);
    c.epsilon = json_value_or(j, "epsilon", c.epsilon);
    c.lr_discount = json_value_or(j, "lr_discount", c.lr_discount);
    c.batch_size = json_value_or(j, "batch_size", c.batch_size);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("curriculum: ") + e.what());
  }
  c.validate();
  return c;
}

nlohmann::json LoopReport::to_json() const {
  nlohmann::json post_stats = nlohmann::json();
  if (post) {
    post_stats = post->to_json();
    // Success rate and region size describe the examination, not the
    // re-evaluation, so only the sample statistics are reported here.
    post_stats.erase("success_rate");
    post_stats.erase("region_size");
    post_stats.erase("num_agents");
    post_stats.erase("num_succeeded");
    post_stats.erase("num_errored");
  }
  return {{"loop", loop},
          {"preset", preset.to_json()},
          {"seed", seed},
          {"pre", pre ? pre->to_json() : nlohmann::json()},
          {"post", post_stats},
          {"adversary_added", adversary_added},
          {"adversary_total", adversary_total},
          {"batch_from_adversary", batch_from_adversary},
          {"batch_from_base", batch_from_base},
          {"train", train},
          {"error", error ? nlohmann::json(*error) : nlohmann::json()}};
}

nlohmann::json CurriculumReport::to_json() const {
  nlohmann::json ls = nlohmann::json::array();
  for (const auto& l : loops) ls.push_back(l.to_json());
  return {{"loops", ls}, {"adversary_total", adversary_set.size()}, {"stop_reason", stop_reason}};
}

CurriculumReport run_curriculum(const CurriculumConfig& config, const ExaminerSetup& setup,
                                SutPool& pool, std::span<const Pose> base_set,
                                std::uint64_t master_seed, const LoopObserver& observer) {
  config.validate();
  CurriculumReport report;
  report.stop_reason = "completed";

  for (std::size_t loop = 0; loop < config.loops; ++loop) {
    LoopReport lr;
    lr.loop = loop;
    lr.preset = config.presets[std::min(loop, config.presets.size() - 1)];
    lr.seed = derive_seed(master_seed, StreamPurpose::kCurriculumLoop, loop);
    lr.train = "skipped";
    const ExaminerSetup loop_setup = apply_preset(setup, lr.preset);
    Examination ex;
    try {
      ex = run_examination(loop_setup, pool, lr.seed);
      lr.pre = ex.report;

      if (!ex.phase2.modes.empty()) {
        auto added = build_adversary_set(ex.phase2.modes, config.samples_per_mode, pool,
                                         loop_setup.tree, loop_setup.hook, lr.seed,
                                         loop_setup.workers);
        for (auto& r : added) {
          r.overrides = lr.preset.nuisance;
          r.loop = loop;
        }
        report.adversary_set.append(added);
        lr.adversary_added = added.size();
      }
      lr.adversary_total = report.adversary_set.size();

      if (!report.adversary_set.empty() || config.epsilon == 0.0) {
        RngStream mix_rng(master_seed, StreamPurpose::kMix, loop);
        const auto mix = epsilon_mix(report.adversary_set.size(), base_set.size(), config.epsilon,
                                     config.batch_size, mix_rng);
        lr.batch_from_adversary = mix.adversary.size();
        lr.batch_from_base = mix.base.size();
        std::vector<Pose> batch;
        batch.reserve(config.batch_size);
        for (std::size_t i : mix.adversary) batch.push_back(report.adversary_set.records()[i].pose);
        for (std::size_t i : mix.base) batch.push_back(base_set[i]);

        const auto outcome = pool.train(batch, config.lr_discount);
        if (outcome == TrainOutcome::kUnsupported) {
          lr.train = "unsupported";
          report.stop_reason = "unsupported";
        } else {
          lr.train = "trained";
          lr.post = reevaluate_report(ex.report, pool, loop_setup.workers);
        }
      }
    } catch (const ExaminerError& e) {
      lr.error = e.what();
      report.stop_reason = "error";
    }
    report.loops.push_back(lr);
    if (observer) observer(LoopArtifacts{report.loops.back(), ex});
    if (report.stop_reason != "completed") break;
  }
  return report;
}

}  // namespace examiner
