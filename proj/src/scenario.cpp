// SPDX-License-Identifier: Apache-2.0

#include "risvec/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace risvec {

double distance(const Position& a, const Position& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

std::size_t ScenarioConfig::resolved_max_users() const {
  if (max_users_per_sv > 0) return max_users_per_sv;
  if (service_vehicles == 0) return 1;
  return std::max<std::size_t>(1, vehicles / service_vehicles);
}

void ScenarioConfig::validate() const {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("scenario: " + what);
  };
  if (vehicles == 0) fail("vehicle count must be at least 1");
  if (service_vehicles == 0) fail("service vehicle count must be at least 1");
  if (resource_blocks == 0) fail("resource block count must be at least 1");
  if (!(road_length > 0.0)) fail("road_length must be positive");
  if (!(slot_duration > 0.0)) fail("slot_duration must be positive");
  if (!(speed > 0.0)) fail("speed must be positive");
  if (!(task_unit_bits > 0.0)) fail("task_unit_bits must be positive");
  if (!(arrival_mean >= 0.0)) fail("arrival_mean must be non-negative");
  if (lane_offsets.empty()) fail("at least one lane offset is required");
  for (const Position* p : {&rsu_pos, &ris_pos}) {
    if (!std::isfinite(p->x) || !std::isfinite(p->y) || !std::isfinite(p->z) ||
        p->z < 0.0)
      fail("positions must be finite with z >= 0");
  }
}

std::size_t ScenarioState::active_users_on(std::size_t sv) const {
  std::size_t n = 0;
  for (std::size_t k = 0; k < users.size(); ++k)
    if (sv_of[k] == sv && task_bits[k] > 0.0) ++n;
  return n;
}

std::size_t ScenarioState::active_users() const {
  return static_cast<std::size_t>(
      std::count_if(task_bits.begin(), task_bits.end(), [](double b) { return b > 0.0; }));
}

ScenarioState init_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> along(0.0, cfg.road_length);
  const auto lanes = cfg.lane_offsets.size();

  ScenarioState s;
  s.rsu = cfg.rsu_pos;
  s.ris = cfg.ris_pos;
  s.users.resize(cfg.vehicles);
  s.service.resize(cfg.service_vehicles);
  for (std::size_t k = 0; k < cfg.vehicles; ++k)
    s.users[k] = {cfg.lane_offsets[k % lanes], along(rng), 0.0};
  for (std::size_t j = 0; j < cfg.service_vehicles; ++j)
    s.service[j] = {cfg.lane_offsets[(cfg.vehicles + j) % lanes], along(rng), 0.0};
  s.task_units.assign(cfg.vehicles, 0);
  s.task_bits.assign(cfg.vehicles, 0.0);
  s.sv_of.assign(cfg.vehicles, 0);
  s.rb_of.assign(2 * cfg.vehicles, 0);
  return s;
}

ScenarioState advance(ScenarioState state, const ScenarioConfig& cfg) {
  const double step = cfg.speed * cfg.slot_duration;
  auto move = [&](Position& p) {
    double y = std::fmod(p.y + step, cfg.road_length);
    if (y < 0.0) y += cfg.road_length;
    // fmod can return road_length itself after rounding.
    if (y >= cfg.road_length) y = 0.0;
    p.y = y;
  };
  for (auto& p : state.users) move(p);
  for (auto& p : state.service) move(p);
  ++state.slot_index;
  return state;
}

ScenarioState draw_tasks(ScenarioState state, const ScenarioConfig& cfg,
                         std::mt19937_64& rng) {
  state.task_units.assign(state.users.size(), 0);
  state.task_bits.assign(state.users.size(), 0.0);
  if (cfg.arrival_mean <= 0.0) return state;
  std::poisson_distribution<std::uint32_t> arrivals(cfg.arrival_mean);
  for (std::size_t k = 0; k < state.users.size(); ++k) {
    state.task_units[k] = arrivals(rng);
    state.task_bits[k] = cfg.task_unit_bits * state.task_units[k];
  }
  return state;
}

ScenarioState assign_svs(ScenarioState state, const ScenarioConfig& cfg) {
  const std::size_t K = state.users.size();
  const std::size_t J = state.service.size();
  const std::size_t cap = cfg.resolved_max_users();

  std::vector<std::vector<double>> dist(K, std::vector<double>(J));
  std::vector<std::vector<std::size_t>> prefs(K);
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t j = 0; j < J; ++j) dist[k][j] = distance(state.users[k], state.service[j]);
    prefs[k].resize(J);
    std::iota(prefs[k].begin(), prefs[k].end(), 0);
    std::stable_sort(prefs[k].begin(), prefs[k].end(), [&](std::size_t a, std::size_t b) {
      return dist[k][a] < dist[k][b];
    });
  }

  // Deferred acceptance: users propose down their preference list, each SV
  // keeps its `cap` closest proposers (lower user index on ties).
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> next(K, 0);
  std::vector<std::size_t> holder(K, kNone);
  std::vector<std::vector<std::size_t>> held(J);
  std::vector<std::size_t> free_users(K);
  std::iota(free_users.begin(), free_users.end(), 0);
  std::vector<std::size_t> overflow;

  while (!free_users.empty()) {
    std::vector<std::size_t> rejected;
    for (std::size_t k : free_users) {
      if (next[k] >= J) {
        overflow.push_back(k);
        continue;
      }
      held[prefs[k][next[k]++]].push_back(k);
    }
    for (std::size_t j = 0; j < J; ++j) {
      auto& h = held[j];
      std::stable_sort(h.begin(), h.end(), [&](std::size_t a, std::size_t b) {
        if (dist[a][j] != dist[b][j]) return dist[a][j] < dist[b][j];
        return a < b;
      });
      while (h.size() > cap) {
        rejected.push_back(h.back());
        h.pop_back();
      }
      for (std::size_t k : h) holder[k] = j;
    }
    for (std::size_t k : rejected) holder[k] = kNone;
    std::sort(rejected.begin(), rejected.end());
    free_users = std::move(rejected);
  }

  state.overflow_warning = !overflow.empty();
  std::sort(overflow.begin(), overflow.end());
  for (std::size_t i = 0; i < overflow.size(); ++i) {
    const std::size_t k = overflow[i];
    holder[k] = prefs[k][i % J];
  }
  state.sv_of = std::move(holder);
  return state;
}

ScenarioState assign_rbs(ScenarioState state, const ScenarioConfig& cfg) {
  const std::size_t links = state.link_count();
  state.rb_of.resize(links);
  for (std::size_t l = 0; l < links; ++l) state.rb_of[l] = l % cfg.resource_blocks;
  return state;
}

}  // namespace risvec
