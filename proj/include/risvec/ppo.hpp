// SPDX-License-Identifier: Apache-2.0
//
// PPO agent over a tanh-squashed diagonal Gaussian policy with a
// state-independent log-std, Monte-Carlo returns, the clipped surrogate, an
// MSE value loss and a Gaussian entropy bonus. Gradients are derived by hand.

#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "risvec/environment.hpp"
#include "risvec/mlp.hpp"

namespace risvec {

struct AgentConfig {
  std::vector<std::size_t> hidden{256, 256};
  double actor_lr = 3e-4;
  double critic_lr = 1e-3;
  double clip = 0.2;
  double discount = 0.6;
  std::size_t episodes = 5000;           // E_max
  std::size_t steps_per_episode = 200;   // T_max steps
  std::size_t update_interval = 2048;    // T_update
  std::size_t epochs = 10;
  std::size_t minibatch = 64;
  double value_coef = 0.5;               // c1
  double entropy_coef = 0.01;            // c2
  double init_log_std = -0.5;
  double log_std_min = -5.0;
  double log_std_max = 2.0;
  std::size_t test_rounds = 1;           // E_test
  std::size_t test_slots = 200;

  void validate() const;
};

struct PolicyParams {
  Mlp actor;                     // obs -> mean of the pre-squash Gaussian
  std::vector<double> log_std;   // one per action dimension
  Mlp critic;                    // obs -> V(s)
};

struct Transition {
  std::vector<double> obs;
  std::vector<double> pre_squash;  // u, with action = tanh(u)
  std::vector<double> action;
  double log_prob = 0.0;
  double value = 0.0;
  double reward = 0.0;
  bool done = false;
};

struct ActionSample {
  std::vector<double> pre_squash;
  std::vector<double> action;
  double log_prob = 0.0;
  double value = 0.0;
};

// log density of a = tanh(u) under the squashed Gaussian, including the
// change-of-variables term.
double squashed_log_prob(std::span<const double> mean, std::span<const double> log_std,
                         std::span<const double> u);

PolicyParams make_policy(std::size_t obs_dim, std::size_t act_dim, const AgentConfig& cfg,
                         std::mt19937_64& rng);

ActionSample sample_action(const PolicyParams& params, std::span<const double> obs,
                           std::mt19937_64& rng);
std::vector<double> deterministic_action(const PolicyParams& params, std::span<const double> obs);

struct ReturnsAdvantages {
  std::vector<double> returns;
  std::vector<double> advantages;  // standardized
};

// Per-episode discounted returns (episodes delimited by `done`), A = G - V,
// then advantages standardized over the whole batch.
ReturnsAdvantages returns_and_advantages(std::span<const Transition> transitions,
                                         double discount);

struct PolicyGradient {
  std::vector<double> actor;
  std::vector<double> log_std;
  std::vector<double> critic;

  explicit PolicyGradient(const PolicyParams& p)
      : actor(p.actor.param_count(), 0.0),
        log_std(p.log_std.size(), 0.0),
        critic(p.critic.param_count(), 0.0) {}
};

struct LossBreakdown {
  double total = 0.0;
  double clip_objective = 0.0;  // L^CLIP
  double value_loss = 0.0;      // L^VF
  double entropy = 0.0;         // S
  double mean_ratio = 0.0;
};

// L_total = -L^CLIP + c1 L^VF - c2 S over the samples at `indices`; fills
// `grad` when non-null (gradients are overwritten, not accumulated).
LossBreakdown ppo_loss(const PolicyParams& params, std::span<const Transition> batch,
                       std::span<const double> advantages, std::span<const double> returns,
                       std::span<const std::size_t> indices, double clip, double value_coef,
                       double entropy_coef, PolicyGradient* grad);

struct Optimizers {
  Adam actor;
  Adam log_std;
  Adam critic;
};

Optimizers make_optimizers(const PolicyParams& params, const AgentConfig& cfg);

struct UpdateStats {
  bool aborted = false;  // non-finite loss encountered
  std::size_t steps = 0;
  LossBreakdown last;
};

UpdateStats ppo_update(PolicyParams& params, Optimizers& opt, std::span<const Transition> batch,
                       const AgentConfig& cfg, std::mt19937_64& rng);

struct StepRecord {
  SlotOutcome outcome;
  std::size_t evaluations = 1;
};

// Runs `steps` slots from the environment's current state with stochastic
// actions; the last transition is marked done.
std::vector<Transition> rollout(Environment& env, const PolicyParams& params, std::size_t steps,
                                std::mt19937_64& rng, std::vector<StepRecord>* records = nullptr);

struct TrainResult {
  PolicyParams params;
  Optimizers optimizers;
  std::vector<double> episode_mean_reward;  // mean per-slot reward per episode
  std::size_t updates = 0;
  bool aborted = false;
};

using EpisodeCallback = std::function<void(std::size_t episode, double mean_reward)>;

TrainResult train(Environment& env, const AgentConfig& cfg, std::uint64_t seed,
                  const EpisodeCallback& on_episode = {});

// Deterministic evaluation (tanh of the mean). With budget > 1 each slot
// additionally scores budget - 1 policy samples and keeps the best, so the
// agent spends the same number of LP evaluations as the baselines.
std::vector<std::vector<StepRecord>> evaluate_policy(Environment& env, const PolicyParams& params,
                                                     std::size_t rounds, std::size_t slots,
                                                     std::uint64_t seed, std::size_t budget = 1);

// Seed of evaluation round r; disjoint from the training episode seeds.
std::uint64_t test_round_seed(std::uint64_t seed, std::size_t round);
std::uint64_t train_episode_seed(std::uint64_t seed, std::size_t episode);

}  // namespace risvec
