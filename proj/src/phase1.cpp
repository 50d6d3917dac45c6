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

#include "examiner/phase1.hpp"

#include <cmath>

#include "examiner/errors.hpp"
#include "examiner/json_io.hpp"
#include "examiner/parallel.hpp"

namespace examiner {

void Phase1Config::validate() const {
  if (num_agents == 0) throw ConfigError("phase1: num_agents must be > 0");
  if (samples_per_update == 0) throw ConfigError("phase1: samples_per_update must be > 0");
  if (!(variance > 0)) throw ConfigError("phase1: variance must be > 0");
  if (!(reward_offset > 0)) throw ConfigError("phase1: reward_offset must be > 0");
  if (diversity_weight < 0) throw ConfigError("phase1: diversity_weight must be >= 0");
  if (!(baseline_rate > 0 && baseline_rate <= 1)) throw ConfigError("phase1: baseline_rate must be in (0, 1]");
  if (!(adversarial_threshold > 0)) throw ConfigError("phase1: adversarial_threshold must be > 0");
  if (!(learning_rate > 0)) throw ConfigError("phase1: learning_rate must be > 0");
  if (max_iterations == 0) throw ConfigError("phase1: max_iterations must be > 0");
  if (termination_window == 0 || termination_window > max_iterations) {
    throw ConfigError("phase1: termination_window must be in [1, max_iterations]");
  }
}

nlohmann::json Phase1Config::to_json() const {
  return {{"num_agents", num_agents},
          {"samples_per_update", samples_per_update},
          {"variance", variance},
          {"reward_offset", reward_offset},
          {"diversity_weight", diversity_weight},
          {"baseline_rate", baseline_rate},
          {"initial_baseline", initial_baseline},
          {"adversarial_threshold", adversarial_threshold},
          {"learning_rate", learning_rate},
          {"max_iterations", max_iterations},
          {"termination_window", termination_window},
          {"max_redraws", max_redraws},
          {"adam", {{"beta1", adam.beta1}, {"beta2", adam.beta2}, {"epsilon", adam.epsilon}}},
          {"policy_bounds", policy_bounds.to_json()}};
}

Phase1Config Phase1Config::from_json(const nlohmann::json& j, std::size_t latent_dims) {
  Phase1Config c;
  c.policy_bounds = SearchSpace::cube(latent_dims, 2.0);
  if (j.is_null()) return c;
  try {
    c.num_agents = json_value_or(j, "num_agents", c.num_agents);
    c.samples_per_update = json_value_or(j, "samples_per_update", c.samples_per_update);
    c.variance = json_value_or(j, "variance", c.variance);
    c.reward_offset = json_value_or(j, "reward_offset", c.reward_offset);
    c.diversity_weight = json_value_or(j, "diversity_weight", c.diversity_weight);
    c.baseline_rate = json_value_or(j, "baseline_rate", c.baseline_rate);
    c.initial_baseline = json_value_or(j, "initial_baseline", c.initial_baseline);
    c.adversarial_threshold = json_value_or(j, "adversarial_threshold", c.adversarial_threshold);
    c.learning_rate = json_value_or(j, "learning_rate", c.learning_rate);
    c.max_iterations = json_value_or(j, "max_iterations", c.max_iterations);
    c.termination_window = json_value_or(j, "termination_window", c.termination_window);
    c.max_redraws = json_value_or(j, "max_redraws", c.max_redraws);
    if (j.contains("adam")) {
      const auto& a = j.at("adam");
      c.adam.beta1 = json_value_or(a, "beta1", c.adam.beta1);
      c.adam.beta2 = json_value_or(a, "beta2", c.adam.beta2);
      c.adam.epsilon = json_value_or(a, "epsilon", c.adam.epsilon);
    }
    if (j.contains("policy_bounds")) {
      const auto& b = j.at("policy_bounds");
      c.policy_bounds = b.is_number() ? SearchSpace::cube(latent_dims, b.get<double>())
                                      : SearchSpace::from_json(b);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("phase1: ") + e.what());
  }
  if (c.policy_bounds.dims() != latent_dims) {
    throw ConfigError("phase1: policy_bounds has " + std::to_string(c.policy_bounds.dims()) +
                      " dims, decoder expects " + std::to_string(latent_dims));
  }
  c.validate();
  return c;
}

nlohmann::json IterationRecord::to_json() const {
  return {{"agent", agent},           {"iter", iter},
          {"mean_err2d", mean_err2d}, {"mean_err3d", mean_err3d},
          {"mean_reward", mean_reward}, {"baseline", baseline},
          {"mu", mu}};
}

nlohmann::json AdversarialSeed::to_json() const {
  nlohmann::json j = {{"agent_id", agent_id},
                      {"z_star", z_star.values},
                      {"pose_star", pose_star.angles},
                      {"final_err2d", final_errors.err_2d},
                      {"final_err3d", final_errors.err_3d},
                      {"iterations_used", iterations_used},
                      {"succeeded", succeeded}};
  j["error"] = error ? nlohmann::json(*error) : nlohmann::json();
  return j;
}

AdversarialSeed AdversarialSeed::from_json(const nlohmann::json& j) {
  AdversarialSeed s;
  s.agent_id = j.at("agent_id").get<std::size_t>();
  s.z_star.values = json_to_vector(j.at("z_star"), "z_star");
  s.pose_star.angles = json_to_vector(j.at("pose_star"), "pose_star");
  s.final_errors = {j.at("final_err2d").get<double>(), j.at("final_err3d").get<double>()};
  s.iterations_used = j.at("iterations_used").get<std::size_t>();
  s.succeeded = j.at("succeeded").get<bool>();
  if (j.contains("error") && !j.at("error").is_null()) s.error = j.at("error").get<std::string>();
  return s;
}

double reward(double err_2d, double reward_offset) { return reward_offset - err_2d; }

Vector score_gradient(const AgentPolicy& policy, const LatentVector& z) {
  if (z.size() != policy.mean.size()) throw ConfigError("score_gradient: dimension mismatch");
  Vector g(z.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = (z.values[i] - policy.mean[i]) / policy.variance;
  return g;
}

Vector reinforce_gradient(const AgentPolicy& policy, std::span<const LatentVector> zs,
                          std::span<const double> rewards) {
  if (zs.empty() || zs.size() != rewards.size()) {
    throw ConfigError("reinforce_gradient: need K >= 1 latents with one reward each");
  }
  Vector g(policy.mean.size(), 0.0);
  for (std::size_t k = 0; k < zs.size(); ++k) {
    const Vector s = score_gradient(policy, zs[k]);
    const double advantage = rewards[k] - policy.baseline;
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += s[i] * advantage;
  }
  const double inv_k = 1.0 / static_cast<double>(zs.size());
  for (auto& v : g) v *= inv_k;
  return g;
}

Vector diversity_force(std::span<const Vector> means, std::size_t i, double gamma) {
  const std::size_t dims = means[i].size();
  Vector force(dims, 0.0);
  if (means.size() < 2) return force;
  for (std::size_t j = 0; j < means.size(); ++j) {
    if (j == i) continue;
    double sq = 0.0;
    for (std::size_t d = 0; d < dims; ++d) {
      const double diff = means[i][d] - means[j][d];
      sq += diff * diff;
    }
    const double dist = std::sqrt(sq);
    if (dist < 1e-9) continue;
    for (std::size_t d = 0; d < dims; ++d) force[d] += (means[i][d] - means[j][d]) / dist;
  }
  const double scale = gamma / static_cast<double>(means.size() - 1);
  for (auto& v : force) v *= scale;
  return force;
}

double update_baseline(double baseline, double rate, double mean_reward) {
  return (1.0 - rate) * baseline + rate * mean_reward;
}

AgentPolicy make_policy(std::size_t agent_id, Vector mean, const Phase1Config& config) {
  AgentPolicy p;
  p.agent_id = agent_id;
  p.variance = config.variance;
  p.baseline = config.initial_baseline;
  p.optimizer.first_moment.assign(mean.size(), 0.0);
  p.optimizer.second_moment.assign(mean.size(), 0.0);
  p.mean = std::move(mean);
  return p;
}

AgentStepResult agent_step(const AgentPolicy& policy, const SearchContext& ctx, Sut& sut,
                           const Phase1Config& config, std::span<const Vector> mean_snapshot,
                           std::size_t self_index, RngStream& rng) {
  const std::size_t dims = policy.mean.size();
  const std::size_t k_samples = config.samples_per_update;
  const double stddev = std::sqrt(policy.variance);

  std::vector<LatentVector> zs;
  std::vector<Pose> poses;
  zs.reserve(k_samples);
  poses.reserve(k_samples);
  for (std::size_t k = 0; k < k_samples; ++k) {
    for (std::size_t attempt = 0;; ++attempt) {
      if (attempt > config.max_redraws) {
        throw SamplingError("agent " + std::to_string(policy.agent_id) + ": no valid pose after " +
                            std::to_string(config.max_redraws) + " redraws");
      }
      LatentVector z{Vector(dims)};
      for (std::size_t d = 0; d < dims; ++d) z.values[d] = policy.mean[d] + stddev * rng.normal();
      config.policy_bounds.clamp(z.values);
      Pose pose = ctx.decoder.decode(z);
      if (validate_pose(pose, ctx.tree, ctx.hook).valid) {
        zs.push_back(std::move(z));
        poses.push_back(std::move(pose));
        break;
      }
    }
  }

  const auto results = sut.evaluate(poses);

  std::vector<double> rewards(k_samples);
  IterationRecord record;
  record.agent = policy.agent_id;
  record.mu = policy.mean;
  for (std::size_t k = 0; k < k_samples; ++k) {
    rewards[k] = reward(results[k].err_2d, config.reward_offset);
    record.mean_err2d += results[k].err_2d;
    record.mean_err3d += results[k].err_3d;
    record.mean_reward += rewards[k];
  }
  const double inv_k = 1.0 / static_cast<double>(k_samples);
  record.mean_err2d *= inv_k;
  record.mean_err3d *= inv_k;
  record.mean_reward *= inv_k;

  // Reward is c - err, so raising the error means descending the reward
  // gradient; the repulsion term is ascended.
  const Vector reward_grad = reinforce_gradient(policy, zs, rewards);
  const Vector repulsion = diversity_force(mean_snapshot, self_index, config.diversity_weight);

  AgentStepResult out{policy, {}};
  AgentPolicy& next = out.policy;
  AdamState& opt = next.optimizer;
  ++opt.steps;
  const double t = static_cast<double>(opt.steps);
  const double bias1 = 1.0 - std::pow(config.adam.beta1, t);
  const double bias2 = 1.0 - std::pow(config.adam.beta2, t);
  for (std::size_t d = 0; d < dims; ++d) {
    const double g = -reward_grad[d] + repulsion[d];
    opt.first_moment[d] = config.adam.beta1 * opt.first_moment[d] + (1.0 - config.adam.beta1) * g;
    opt.second_moment[d] =
        config.adam.beta2 * opt.second_moment[d] + (1.0 - config.adam.beta2) * g * g;
    const double m_hat = opt.first_moment[d] / bias1;
    const double v_hat = opt.second_moment[d] / bias2;
    next.mean[d] += config.learning_rate * m_hat / (std::sqrt(v_hat) + config.adam.epsilon);
  }
  config.policy_bounds.clamp(next.mean);
  next.baseline = update_baseline(policy.baseline, config.baseline_rate, record.mean_reward);
  record.baseline = next.baseline;
  out.record = std::move(record);
  return out;
}

Phase1Result run_phase1(const Phase1Config& config, const SearchContext& ctx, SutPool& pool,
                        std::uint64_t master_seed, std::size_t workers) {
  config.validate();
  if (config.policy_bounds.dims() != ctx.decoder.input_dims()) {
    throw ConfigError("phase1: policy bounds and decoder input differ in dimension");
  }
  const std::size_t n = config.num_agents;

  std::vector<AgentPolicy> policies;
  std::vector<RngStream> streams;
  for (std::size_t i = 0; i < n; ++i) {
    RngStream init(master_seed, StreamPurpose::kPhase1Init, i);
    policies.push_back(make_policy(i, sample_uniform(config.policy_bounds, init).values, config));
    streams.emplace_back(master_seed, StreamPurpose::kPhase1, i);
  }

  struct AgentState {
    bool active = true;
    std::vector<double> err3d_history;
    std::optional<IterationRecord> last;
  };
  std::vector<AgentState> state(n);
  std::vector<AdversarialSeed> seeds(n);
  for (std::size_t i = 0; i < n; ++i) seeds[i].agent_id = i;

  Phase1Result result;
  // Errored agents drop out of the repulsion snapshot; finished agents stay
  // in it at their final mean.
  std::vector<bool> in_snapshot(n, true);

  for (std::size_t iter = 1; iter <= config.max_iterations; ++iter) {
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < n; ++i) {
      if (state[i].active) active.push_back(i);
    }
    if (active.empty()) break;

    std::vector<Vector> snapshot;
    std::vector<std::size_t> snapshot_pos(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      if (!in_snapshot[i]) continue;
      snapshot_pos[i] = snapshot.size();
      snapshot.push_back(policies[i].mean);
    }

    std::vector<std::optional<AgentStepResult>> steps(active.size());
    std::vector<std::optional<std::string>> failures(active.size());
    parallel_for(active.size(), workers, [&](std::size_t idx, std::size_t worker) {
      const std::size_t agent = active[idx];
      try {
        auto step = agent_step(policies[agent], ctx, pool.at(worker), config, snapshot,
                               snapshot_pos[agent], streams[agent]);
        step.record.iter = iter;
        steps[idx] = std::move(step);
      } catch (const ExaminerError& e) {
        failures[idx] = e.what();
      }
    });

    for (std::size_t idx = 0; idx < active.size(); ++idx) {
      const std::size_t agent = active[idx];
      AgentState& st = state[agent];
      AdversarialSeed& seed = seeds[agent];
      if (failures[idx]) {
        st.active = false;
        in_snapshot[agent] = false;
        seed.error = *failures[idx];
        seed.succeeded = false;
        seed.iterations_used = iter;
        seed.z_star.values = policies[agent].mean;
        continue;
      }
      AgentStepResult& step = *steps[idx];
      result.log.push_back(step.record);
      st.err3d_history.push_back(step.record.mean_err3d);
      seed.iterations_used = iter;
      seed.final_errors = {step.record.mean_err2d, step.record.mean_err3d};
      seed.z_star.values = step.record.mu;

      bool terminate = false;
      if (st.err3d_history.size() >= config.termination_window) {
        double sum = 0.0;
        for (std::size_t k = st.err3d_history.size() - config.termination_window;
             k < st.err3d_history.size(); ++k) {
          sum += st.err3d_history[k];
        }
        terminate = sum / static_cast<double>(config.termination_window) >
                    config.adversarial_threshold;
      }
      if (terminate) {
        // The policy that produced this window is the output; the update
        // computed in the same step is discarded.
        st.active = false;
        seed.succeeded = true;
      } else {
        policies[agent] = std::move(step.policy);
        if (iter == config.max_iterations) seed.z_star.values = policies[agent].mean;
      }
    }
  }

  for (auto& seed : seeds) {
    if (!seed.error) seed.pose_star = ctx.decoder.decode(seed.z_star);
  }
  result.seeds = std::move(seeds);
  return result;
}

}  // namespace examiner
