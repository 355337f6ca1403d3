// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <numeric>
#include <random>

#include "risvec/checkpoint.hpp"
#include "risvec/environment.hpp"
#include "risvec/ppo.hpp"

using namespace risvec;

namespace {

SystemConfig small_system() {
  SystemConfig s;
  s.scenario.vehicles = 3;
  s.scenario.service_vehicles = 2;
  s.scenario.resource_blocks = 3;
  s.radio.ris_elements = 4;
  return s;
}

std::shared_ptr<const SemanticTable> table() {
  static auto t = std::make_shared<const SemanticTable>(SemanticTable::synthetic());
  return t;
}

AgentConfig toy_agent() {
  AgentConfig a;
  a.hidden = {5};
  a.episodes = 4;
  a.steps_per_episode = 12;
  a.update_interval = 24;
  a.epochs = 2;
  a.minibatch = 8;
  return a;
}

std::vector<Transition> fake_batch(const PolicyParams& p, std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Transition> b;
  for (std::size_t i = 0; i < n; ++i) {
    Transition t;
    t.obs.resize(p.actor.input_dim());
    for (double& x : t.obs) x = g(rng);
    const ActionSample s = sample_action(p, t.obs, rng);
    t.pre_squash = s.pre_squash;
    t.action = s.action;
    t.log_prob = s.log_prob;
    t.value = s.value;
    t.reward = -std::abs(g(rng));
    t.done = (i + 1) % 4 == 0;
    b.push_back(std::move(t));
  }
  return b;
}

}  // namespace

TEST_CASE("symbol-count mapping") {
  CHECK(map_nu(-1.0, 20) == 1);
  CHECK(map_nu(1.0, 20) == 20);
  CHECK(map_nu(0.0, 21) == 11);
  CHECK(map_nu(0.5, 1) == 1);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    const int nu = map_nu(u(rng), 20);
    CHECK(nu >= 1);
    CHECK(nu <= 20);
  }
}

TEST_CASE("phase mapping") {
  CHECK(map_phase(-1.0, 2) == 0u);
  CHECK(discrete_phase(map_phase(0.0, 2), 2) == std::numbers::pi);
  CHECK(discrete_phase(map_phase(1.0, 2), 2) == 3 * std::numbers::pi / 2);
  // pi/4 sits midway between 0 and pi/2: tie goes to the smaller phase
  CHECK(map_phase(-0.75, 2) == 0u);
  CHECK(map_phase(-0.74, 2) == 1u);
}

TEST_CASE("returns and advantages") {
  std::vector<Transition> tr(3);
  for (auto& t : tr) t.reward = -2.0;
  tr.back().done = true;
  auto ra = returns_and_advantages(tr, 0.5);
  CHECK(ra.returns[0] == doctest::Approx(-3.5));
  CHECK(ra.returns[1] == doctest::Approx(-3.0));
  CHECK(ra.returns[2] == doctest::Approx(-2.0));
  CHECK(std::abs(std::accumulate(ra.advantages.begin(), ra.advantages.end(), 0.0)) < 1e-9);

  tr[1].reward = 5.0;
  ra = returns_and_advantages(tr, 0.0);
  for (std::size_t i = 0; i < 3; ++i) CHECK(ra.returns[i] == tr[i].reward);

  // episodes do not leak into each other
  std::vector<Transition> two(4);
  for (auto& t : two) t.reward = 1.0;
  two[1].done = two[3].done = true;
  ra = returns_and_advantages(two, 0.9);
  CHECK(ra.returns[0] == doctest::Approx(1.9));
  CHECK(ra.returns[1] == doctest::Approx(1.0));
  CHECK(ra.returns[2] == doctest::Approx(1.9));
}

TEST_CASE("sampling") {
  std::mt19937_64 rng(4);
  AgentConfig cfg = toy_agent();
  PolicyParams p = make_policy(3, 2, cfg, rng);
  const std::vector<double> obs{0.3, -0.2, 0.9};
  const auto mean = p.actor.forward(obs);

  SUBCASE("actions stay in (-1, 1)") {
    p.log_std = {1.5, 1.5};
    for (int i = 0; i < 2000; ++i)
      for (double a : sample_action(p, obs, rng).action) {
        CHECK(a > -1.0);
        CHECK(a < 1.0);
      }
  }
  SUBCASE("vanishing noise gives tanh of the mean") {
    p.log_std = {-30.0, -30.0};
    const auto s = sample_action(p, obs, rng);
    const auto det = deterministic_action(p, obs);
    for (std::size_t j = 0; j < 2; ++j) {
      CHECK(s.action[j] == doctest::Approx(std::tanh(mean[j])).epsilon(1e-12));
      CHECK(det[j] == std::tanh(mean[j]));
    }
  }
  SUBCASE("pre-squash sample mean matches the actor output") {
    p.log_std = {-0.5, 0.3};
    const int n = 10000;
    std::vector<double> sum(2, 0.0);
    for (int i = 0; i < n; ++i) {
      const auto s = sample_action(p, obs, rng);
      for (std::size_t j = 0; j < 2; ++j) sum[j] += s.pre_squash[j];
    }
    for (std::size_t j = 0; j < 2; ++j)
      CHECK(std::abs(sum[j] / n - mean[j]) < 3.0 * std::exp(p.log_std[j]) / std::sqrt(double(n)));
  }
}

TEST_CASE("log-density of the squashed Gaussian matches sampling frequencies") {
  std::mt19937_64 rng(8);
  const double m = 0.4, ls = -0.2;
  std::normal_distribution<double> g(m, std::exp(ls));
  const int n = 200000;
  const double lo = 0.1, hi = 0.3;
  int hits = 0;
  for (int i = 0; i < n; ++i) {
    const double a = std::tanh(g(rng));
    if (a >= lo && a < hi) ++hits;
  }
  // integrate exp(log p(a)) over [lo, hi] with Simpson's rule
  const int steps = 200;
  const double h = (hi - lo) / steps;
  double integral = 0.0;
  for (int i = 0; i <= steps; ++i) {
    const double a = lo + i * h;
    const double u = std::atanh(a);
    const double d = std::exp(squashed_log_prob(std::vector<double>{m}, std::vector<double>{ls},
                                                std::vector<double>{u}));
    integral += d * (i == 0 || i == steps ? 1 : (i % 2 ? 4 : 2));
  }
  integral *= h / 3;
  const double freq = double(hits) / n;
  CHECK(std::abs(freq - integral) < 3.0 * std::sqrt(integral * (1 - integral) / n));

  // stable for large pre-squash values
  const double far = squashed_log_prob(std::vector<double>{0.0}, std::vector<double>{0.0},
                                       std::vector<double>{25.0});
  CHECK(std::isfinite(far));
}

TEST_CASE("unchanged parameters give ratio one") {
  std::mt19937_64 rng(10);
  PolicyParams p = make_policy(4, 3, toy_agent(), rng);
  const auto batch = fake_batch(p, 16, rng);
  const auto ra = returns_and_advantages(batch, 0.6);
  std::vector<std::size_t> idx(batch.size());
  std::iota(idx.begin(), idx.end(), 0);
  const auto loss = ppo_loss(p, batch, ra.advantages, ra.returns, idx, 0.2, 0.5, 0.01, nullptr);
  CHECK(std::abs(loss.mean_ratio - 1.0) < 1e-12);
  for (const auto& t : batch) {
    const auto mean = p.actor.forward(t.obs);
    CHECK(std::abs(std::exp(squashed_log_prob(mean, p.log_std, t.pre_squash) - t.log_prob) - 1.0) < 1e-12);
  }
}

TEST_CASE("clipping caps the gain for positive advantages") {
  std::mt19937_64 rng(12);
  PolicyParams p = make_policy(2, 1, toy_agent(), rng);
  auto batch = fake_batch(p, 1, rng);
  batch[0].log_prob -= 1.0;  // ratio e > 1 + clip
  const std::vector<double> adv{2.0}, ret{0.0};
  const std::vector<std::size_t> idx{0};
  PolicyGradient g(p);
  const auto loss = ppo_loss(p, batch, adv, ret, idx, 0.2, 0.0, 0.0, &g);
  CHECK(loss.clip_objective == doctest::Approx(1.2 * 2.0));
  for (double v : g.actor) CHECK(v == 0.0);
}

TEST_CASE("analytic gradients match central differences") {
  std::mt19937_64 rng(21);
  PolicyParams p = make_policy(4, 2, toy_agent(), rng);
  for (double& w : p.actor.params()) w *= 30.0;  // lift the small output init
  p.log_std = {-0.3, 0.2};
  for (int trial = 0; trial < 5; ++trial) {
    auto batch = fake_batch(p, 8, rng);
    // move the behavior log-probs so some samples sit outside the clip range
    std::normal_distribution<double> jitter(0.0, 0.15);
    for (auto& t : batch) t.log_prob += jitter(rng);
    const auto ra = returns_and_advantages(batch, 0.6);
    std::vector<std::size_t> idx(batch.size());
    std::iota(idx.begin(), idx.end(), 0);
    PolicyGradient g(p);
    ppo_loss(p, batch, ra.advantages, ra.returns, idx, 0.2, 0.5, 0.01, &g);

    auto loss_at = [&](PolicyParams& q) {
      return ppo_loss(q, batch, ra.advantages, ra.returns, idx, 0.2, 0.5, 0.01, nullptr).total;
    };
    auto check = [&](std::span<double> params, const std::vector<double>& analytic) {
      for (std::size_t i = 0; i < params.size(); ++i) {
        const double keep = params[i];
        const double h = 1e-6;
        params[i] = keep + h;
        const double up = loss_at(p);
        params[i] = keep - h;
        const double down = loss_at(p);
        params[i] = keep;
        const double numeric = (up - down) / (2 * h);
        const double scale = std::max({std::abs(numeric), std::abs(analytic[i]), 1e-3});
        CHECK(std::abs(numeric - analytic[i]) / scale < 1e-4);
      }
    };
    check(p.actor.params(), g.actor);
    check(p.log_std, g.log_std);
    check(p.critic.params(), g.critic);
  }
}

TEST_CASE("environment decisions and rewards") {
  Environment env(small_system(), table());
  env.reset(5);
  CHECK(env.obs_dim() == 3 * 5 + 3 + 4 + 6);
  CHECK(env.action_dim() == 4 + 6);
  for (double o : env.observation()) {
    CHECK(std::isfinite(o));
    CHECK(o >= -1.0);
    CHECK(o <= 1.0);
  }
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 30; ++t) {
    std::vector<double> a(env.action_dim());
    for (double& x : a) x = u(rng);
    const Decision d = env.decode(a);
    const SlotOutcome o = env.evaluate(d);
    CHECK(o.reward() <= 0.0);
    double oracle = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
      if (env.state().task_bits[k] <= 0.0) continue;
      oracle += closed_form_oracle(o.paths[k]).t_star;
      const auto& s = o.splits[k];
      CHECK(std::abs(s.rho_loc + s.rho_rsu + s.rho_sv - 1.0) < 1e-9);
    }
    CHECK(o.total_delay == doctest::Approx(oracle).epsilon(1e-6));
    for (std::size_t l = 0; l < 6; ++l) {
      CHECK(o.executed_nu[l] >= 1);
      CHECK(o.executed_nu[l] <= 20);
      if (!o.link_usable[l]) CHECK(o.delta[l] < 0.9);
      else CHECK(o.delta[l] >= 0.9);
    }
    env.step(d);
  }

  SystemConfig idle = small_system();
  idle.scenario.arrival_mean = 0.0;
  Environment quiet(idle, table());
  const SlotOutcome o = quiet.evaluate(quiet.heuristic_decision());
  CHECK(o.reward() == 0.0);
  CHECK(o.violations() == 0);
}

TEST_CASE("training and evaluation are reproducible") {
  Environment env(small_system(), table());
  const AgentConfig cfg = toy_agent();
  const auto a = train(env, cfg, 7);
  const auto b = train(env, cfg, 7);
  REQUIRE(a.episode_mean_reward.size() == cfg.episodes);
  CHECK(a.episode_mean_reward == b.episode_mean_reward);
  CHECK(a.updates == 2);
  for (double r : a.episode_mean_reward) CHECK(r <= 0.0);
  for (double ls : a.params.log_std) {
    CHECK(ls >= cfg.log_std_min);
    CHECK(ls <= cfg.log_std_max);
  }

  const auto e1 = evaluate_policy(env, a.params, 2, 10, 3);
  const auto e2 = evaluate_policy(env, a.params, 2, 10, 3);
  REQUIRE(e1.size() == 2);
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t t = 0; t < 10; ++t) {
      CHECK(e1[r][t].outcome.total_delay == e2[r][t].outcome.total_delay);
      CHECK(e1[r][t].evaluations == 1);
    }
  const auto best = evaluate_policy(env, a.params, 1, 10, 3, 8);
  for (std::size_t t = 0; t < 10; ++t) CHECK(best[0][t].evaluations == 8);
}

TEST_CASE("checkpoint round trip") {
  Environment env(small_system(), table());
  auto tr = train(env, toy_agent(), 1);
  const auto path = std::filesystem::temp_directory_path() / "risvec_ckpt_test.json";
  save_checkpoint(path, {tr.params, tr.optimizers, env.normalization(), "abc123"});
  const Checkpoint c = load_checkpoint(path);
  CHECK(c.config_hash == "abc123");
  CHECK(c.params.actor.sizes() == tr.params.actor.sizes());
  CHECK(std::equal(c.params.actor.params().begin(), c.params.actor.params().end(),
                   tr.params.actor.params().begin()));
  CHECK(std::equal(c.params.critic.params().begin(), c.params.critic.params().end(),
                   tr.params.critic.params().begin()));
  CHECK(c.params.log_std == tr.params.log_std);
  CHECK(c.optimizers.actor.first_moment() == tr.optimizers.actor.first_moment());
  CHECK(c.optimizers.critic.steps() == tr.optimizers.critic.steps());
  CHECK(c.normalization.y_hi == env.normalization().y_hi);

  const auto obs = env.observation();
  CHECK(deterministic_action(c.params, obs) == deterministic_action(tr.params, obs));

  std::ofstream(path) << "{\"format\":\"risvec-checkpoint\",\"version\":99}";
  CHECK_THROWS_AS(load_checkpoint(path), std::runtime_error);
  std::ofstream(path) << "not json";
  CHECK_THROWS_AS(load_checkpoint(path), std::runtime_error);
}
