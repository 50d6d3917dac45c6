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

// Multi-agent worst-case search with Gaussian policies and score-function
// gradients. Each agent keeps a mean in latent space; the population is
// pushed apart by a repulsion term on the means.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "examiner/decoder.hpp"
#include "examiner/param_space.hpp"
#include "examiner/rng.hpp"
#include "examiner/sut.hpp"
#include "json.hpp"

namespace examiner {

struct AdamParams {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct Phase1Config {
  std::size_t num_agents = 8;
  std::size_t samples_per_update = 8;  // K
  double variance = 0.05;              // fixed policy variance, per dim
  double reward_offset = 50.0;         // c, mm
  double diversity_weight = 0.2;       // gamma
  double baseline_rate = 0.1;          // tau
  double initial_baseline = 0.5;
  double adversarial_threshold = 90.0;  // T, mm
  double learning_rate = 0.2;
  std::size_t max_iterations = 300;
  std::size_t termination_window = 10;
  std::size_t max_redraws = 100;
  AdamParams adam;
  SearchSpace policy_bounds = SearchSpace::cube(32, 2.0);

  void validate() const;
  nlohmann::json to_json() const;
  // Missing keys keep their defaults; `latent_dims` sizes the default bounds.
  static Phase1Config from_json(const nlohmann::json& j, std::size_t latent_dims);
};

struct AdamState {
  Vector first_moment;
  Vector second_moment;
  std::uint64_t steps = 0;
};

struct AgentPolicy {
  std::size_t agent_id = 0;
  Vector mean;
  double variance = 0.05;
  double baseline = 0.5;
  AdamState optimizer;
};

struct IterationRecord {
  std::size_t agent = 0;
  std::size_t iter = 0;
  double mean_err2d = 0.0;
  double mean_err3d = 0.0;
  double mean_reward = 0.0;
  double baseline = 0.0;  // after the update of this iteration
  Vector mu;              // mean the samples were drawn from

  nlohmann::json to_json() const;
};

struct AdversarialSeed {
  std::size_t agent_id = 0;
  LatentVector z_star;
  Pose pose_star;
  EvalResult final_errors;  // batch means at the last iteration
  std::size_t iterations_used = 0;
  bool succeeded = false;
  std::optional<std::string> error;  // set when the agent failed with an error

  nlohmann::json to_json() const;
  static AdversarialSeed from_json(const nlohmann::json& j);
};

// What an agent needs besides its SUT handle.
struct SearchContext {
  const Decoder& decoder;
  const KinematicTree& tree;
  ValidityHook hook;
};

double reward(double err_2d, double reward_offset);

// d/d mean of log N(z; mean, variance I) = (z - mean) / variance.
Vector score_gradient(const AgentPolicy& policy, const LatentVector& z);

// (1/K) sum_k score(z_k) (R_k - b): estimate of the gradient of E[R].
Vector reinforce_gradient(const AgentPolicy& policy, std::span<const LatentVector> zs,
                          std::span<const double> rewards);

// Gradient of gamma * mean_{j != i} |mu_i - mu_j| with respect to mu_i. Pairs
// closer than 1e-9 contribute nothing.
Vector diversity_force(std::span<const Vector> means, std::size_t i, double gamma);

double update_baseline(double baseline, double rate, double mean_reward);

AgentPolicy make_policy(std::size_t agent_id, Vector mean, const Phase1Config& config);

struct AgentStepResult {
  AgentPolicy policy;
  IterationRecord record;
};

// One iteration for one agent: draw K clamped latents, decode, reject invalid
// poses, evaluate, then take an Adam step that raises the error (descends the
// reward) and raises the distance to the other agents' means. `mean_snapshot`
// holds the population's means at iteration start; this agent is at
// `self_index`.
AgentStepResult agent_step(const AgentPolicy& policy, const SearchContext& ctx, Sut& sut,
                           const Phase1Config& config, std::span<const Vector> mean_snapshot,
                           std::size_t self_index, RngStream& rng);

struct Phase1Result {
  std::vector<AdversarialSeed> seeds;   // agent-id order
  std::vector<IterationRecord> log;     // iteration-major, agent-id minor
};

Phase1Result run_phase1(const Phase1Config& config, const SearchContext& ctx, SutPool& pool,
                        std::uint64_t master_seed, std::size_t workers);

}  // namespace examiner
