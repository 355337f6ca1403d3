// SPDX-License-Identifier: Apache-2.0

#include "risvec/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace risvec {

namespace {

const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

// log(1 - tanh(u)^2), stable for large |u|.
double log_tanh_jacobian(double u) { return 2.0 * (std::numbers::ln2 - u - softplus(-2.0 * u)); }

std::uint64_t mix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

void AgentConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("agent: " + what); };
  if (hidden.empty()) fail("at least one hidden layer is required");
  for (auto h : hidden)
    if (h == 0) fail("hidden layer widths must be positive");
  if (!(actor_lr > 0.0) || !(critic_lr > 0.0)) fail("learning rates must be positive");
  if (!(clip > 0.0 && clip < 1.0)) fail("clip must lie in (0, 1)");
  if (!(discount >= 0.0 && discount <= 1.0)) fail("discount must lie in [0, 1]");
  if (episodes == 0 || steps_per_episode == 0) fail("episodes and steps_per_episode must be positive");
  if (update_interval == 0 || epochs == 0 || minibatch == 0) fail("update settings must be positive");
  if (value_coef < 0.0 || entropy_coef < 0.0) fail("loss coefficients must be non-negative");
  if (!(log_std_min < log_std_max)) fail("log_std bounds are inverted");
  if (test_rounds == 0 || test_slots == 0) fail("test_rounds and test_slots must be positive");
}

std::uint64_t train_episode_seed(std::uint64_t seed, std::size_t episode) {
  return mix(mix(seed) + 2 * episode);
}

std::uint64_t test_round_seed(std::uint64_t seed, std::size_t round) {
  return mix(mix(seed) + 2 * round + 1);
}

double squashed_log_prob(std::span<const double> mean, std::span<const double> log_std,
                         std::span<const double> u) {
  double lp = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double z = (u[j] - mean[j]) * std::exp(-log_std[j]);
    lp += -0.5 * z * z - log_std[j] - kHalfLog2Pi - log_tanh_jacobian(u[j]);
  }
  return lp;
}

PolicyParams make_policy(std::size_t obs_dim, std::size_t act_dim, const AgentConfig& cfg,
                         std::mt19937_64& rng) {
  std::vector<std::size_t> a{obs_dim};
  a.insert(a.end(), cfg.hidden.begin(), cfg.hidden.end());
  std::vector<std::size_t> c = a;
  a.push_back(act_dim);
  c.push_back(1);
  PolicyParams p{Mlp(a), std::vector<double>(act_dim, cfg.init_log_std), Mlp(c)};
  p.actor.init(rng, 0.01);
  p.critic.init(rng, 1.0);
  return p;
}

ActionSample sample_action(const PolicyParams& params, std::span<const double> obs,
                           std::mt19937_64& rng) {
  const std::vector<double> mean = params.actor.forward(obs);
  std::normal_distribution<double> n(0.0, 1.0);
  ActionSample s;
  s.pre_squash.resize(mean.size());
  s.action.resize(mean.size());
  for (std::size_t j = 0; j < mean.size(); ++j) {
    s.pre_squash[j] = mean[j] + std::exp(params.log_std[j]) * n(rng);
    s.action[j] = std::tanh(s.pre_squash[j]);
  }
  s.log_prob = squashed_log_prob(mean, params.log_std, s.pre_squash);
  s.value = params.critic.forward(obs)[0];
  return s;
}

std::vector<double> deterministic_action(const PolicyParams& params, std::span<const double> obs) {
  std::vector<double> a = params.actor.forward(obs);
  for (double& v : a) v = std::tanh(v);
  return a;
}

ReturnsAdvantages returns_and_advantages(std::span<const Transition> tr, double discount) {
  ReturnsAdvantages out;
  const std::size_t n = tr.size();
  out.returns.assign(n, 0.0);
  out.advantages.assign(n, 0.0);
  double g = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    if (tr[i].done) g = 0.0;
    g = tr[i].reward + discount * g;
    out.returns[i] = g;
    out.advantages[i] = g - tr[i].value;
  }
  if (n == 0) return out;
  const double mean = std::accumulate(out.advantages.begin(), out.advantages.end(), 0.0) /
                      static_cast<double>(n);
  double var = 0.0;
  for (double a : out.advantages) var += (a - mean) * (a - mean);
  const double sd = std::sqrt(var / static_cast<double>(n));
  for (double& a : out.advantages) a = (a - mean) / (sd + 1e-8);
  return out;
}

LossBreakdown ppo_loss(const PolicyParams& params, std::span<const Transition> batch,
                       std::span<const double> advantages, std::span<const double> returns,
                       std::span<const std::size_t> indices, double clip, double value_coef,
                       double entropy_coef, PolicyGradient* grad) {
  LossBreakdown out;
  const std::size_t m = indices.size();
  if (m == 0) return out;
  const double inv_m = 1.0 / static_cast<double>(m);
  const std::size_t act = params.log_std.size();
  if (grad) {
    std::fill(grad->actor.begin(), grad->actor.end(), 0.0);
    std::fill(grad->log_std.begin(), grad->log_std.end(), 0.0);
    std::fill(grad->critic.begin(), grad->critic.end(), 0.0);
  }

  std::vector<double> inv_std(act);
  for (std::size_t j = 0; j < act; ++j) inv_std[j] = std::exp(-params.log_std[j]);

  std::vector<double> d_mean(act);
  double value_d[1];
  for (std::size_t idx : indices) {
    const Transition& t = batch[idx];
    const double adv = advantages[idx];
    const auto actor_trace = params.actor.forward_trace(t.obs);
    const std::vector<double>& mean = actor_trace.back();
    const double logp = squashed_log_prob(mean, params.log_std, t.pre_squash);
    const double ratio = std::exp(logp - t.log_prob);
    const double clipped = std::clamp(ratio, 1.0 - clip, 1.0 + clip);
    const double surr1 = ratio * adv;
    const double surr2 = clipped * adv;
    out.clip_objective += std::min(surr1, surr2) * inv_m;
    out.mean_ratio += ratio * inv_m;

    const auto critic_trace = params.critic.forward_trace(t.obs);
    const double v = critic_trace.back()[0];
    const double err = v - returns[idx];
    out.value_loss += err * err * inv_m;

    if (!grad) continue;
    // d min(surr1, surr2) / d logp: the unclipped branch carries the gradient
    // unless the clipped constant is strictly smaller.
    double d_obj = 0.0;
    if (surr1 <= surr2) d_obj = adv * ratio;
    const double d_logp = -d_obj * inv_m;  // loss carries -L^CLIP
    if (d_logp != 0.0) {
      for (std::size_t j = 0; j < act; ++j) {
        const double z = (t.pre_squash[j] - mean[j]) * inv_std[j];
        d_mean[j] = d_logp * z * inv_std[j];
        grad->log_std[j] += d_logp * (z * z - 1.0);
      }
      params.actor.backward(actor_trace, d_mean, grad->actor);
    }
    value_d[0] = value_coef * 2.0 * err * inv_m;
    params.critic.backward(critic_trace, std::span<const double>(value_d, 1), grad->critic);
  }

  // Entropy of the pre-squash Gaussian; state independent.
  for (std::size_t j = 0; j < act; ++j) out.entropy += params.log_std[j] + 0.5 + kHalfLog2Pi;
  if (grad)
    for (std::size_t j = 0; j < act; ++j) grad->log_std[j] -= entropy_coef;

  out.total = -out.clip_objective + value_coef * out.value_loss - entropy_coef * out.entropy;
  return out;
}

Optimizers make_optimizers(const PolicyParams& params, const AgentConfig& cfg) {
  return {Adam(params.actor.param_count(), {cfg.actor_lr}),
          Adam(params.log_std.size(), {cfg.actor_lr}),
          Adam(params.critic.param_count(), {cfg.critic_lr})};
}

UpdateStats ppo_update(PolicyParams& params, Optimizers& opt, std::span<const Transition> batch,
                       const AgentConfig& cfg, std::mt19937_64& rng) {
  UpdateStats stats;
  if (batch.empty()) return stats;
  const ReturnsAdvantages ra = returns_and_advantages(batch, cfg.discount);
  std::vector<std::size_t> order(batch.size());
  std::iota(order.begin(), order.end(), 0);
  PolicyGradient grad(params);

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += cfg.minibatch) {
      const std::size_t end = std::min(order.size(), start + cfg.minibatch);
      const std::span<const std::size_t> idx(order.data() + start, end - start);
      stats.last = ppo_loss(params, batch, ra.advantages, ra.returns, idx, cfg.clip,
                            cfg.value_coef, cfg.entropy_coef, &grad);
      if (!std::isfinite(stats.last.total)) {
        stats.aborted = true;
        return stats;
      }
      opt.actor.step(params.actor.params(), grad.actor);
      opt.log_std.step(params.log_std, grad.log_std);
      opt.critic.step(params.critic.params(), grad.critic);
      for (double& s : params.log_std) s = std::clamp(s, cfg.log_std_min, cfg.log_std_max);
      ++stats.steps;
    }
  }
  return stats;
}

std::vector<Transition> rollout(Environment& env, const PolicyParams& params, std::size_t steps,
                                std::mt19937_64& rng, std::vector<StepRecord>* records) {
  std::vector<Transition> out;
  out.reserve(steps);
  std::vector<double> obs = env.observation();
  for (std::size_t t = 0; t < steps; ++t) {
    ActionSample s = sample_action(params, obs, rng);
    const Decision d = env.decode(s.action);
    SlotOutcome o = env.step(d);
    Transition tr;
    tr.obs = std::move(obs);
    tr.pre_squash = std::move(s.pre_squash);
    tr.action = std::move(s.action);
    tr.log_prob = s.log_prob;
    tr.value = s.value;
    tr.reward = o.reward();
    tr.done = t + 1 == steps;
    out.push_back(std::move(tr));
    if (records) records->push_back({std::move(o), 1});
    obs = env.observation();
  }
  return out;
}

TrainResult train(Environment& env, const AgentConfig& cfg, std::uint64_t seed,
                  const EpisodeCallback& on_episode) {
  cfg.validate();
  std::mt19937_64 rng(mix(seed ^ 0xA11CEull));
  TrainResult res{make_policy(env.obs_dim(), env.action_dim(), cfg, rng), {}, {}, 0, false};
  res.optimizers = make_optimizers(res.params, cfg);

  std::vector<Transition> buffer;
  buffer.reserve(cfg.update_interval + cfg.steps_per_episode);
  for (std::size_t e = 0; e < cfg.episodes; ++e) {
    env.reset(train_episode_seed(seed, e));
    auto tr = rollout(env, res.params, cfg.steps_per_episode, rng);
    double sum = 0.0;
    for (const auto& t : tr) sum += t.reward;
    const double mean = sum / static_cast<double>(tr.size());
    res.episode_mean_reward.push_back(mean);
    if (on_episode) on_episode(e, mean);
    std::move(tr.begin(), tr.end(), std::back_inserter(buffer));

    // Updates happen on episode boundaries so every return is a full
    // Monte-Carlo return.
    if (buffer.size() >= cfg.update_interval) {
      const UpdateStats st = ppo_update(res.params, res.optimizers, buffer, cfg, rng);
      buffer.clear();
      ++res.updates;
      if (st.aborted) {
        res.aborted = true;
        break;
      }
    }
  }
  return res;
}

std::vector<std::vector<StepRecord>> evaluate_policy(Environment& env, const PolicyParams& params,
                                                     std::size_t rounds, std::size_t slots,
                                                     std::uint64_t seed, std::size_t budget) {
  if (budget == 0) throw std::invalid_argument("evaluate_policy: budget must be positive");
  std::mt19937_64 rng(mix(seed ^ 0xE7A1ull));
  std::vector<std::vector<StepRecord>> out(rounds);
  for (std::size_t r = 0; r < rounds; ++r) {
    env.reset(test_round_seed(seed, r));
    out[r].reserve(slots);
    for (std::size_t t = 0; t < slots; ++t) {
      const std::vector<double> obs = env.observation();
      Decision best_d = env.decode(deterministic_action(params, obs));
      SlotOutcome best = env.evaluate(best_d);
      for (std::size_t b = 1; b < budget; ++b) {
        const ActionSample s = sample_action(params, obs, rng);
        Decision d = env.decode(s.action);
        SlotOutcome o = env.evaluate(d);
        if (o.total_delay < best.total_delay) {
          best = std::move(o);
          best_d = std::move(d);
        }
      }
      env.commit(best_d);
      out[r].push_back({std::move(best), budget});
    }
  }
  return out;
}

}  // namespace risvec
