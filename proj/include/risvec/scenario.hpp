// SPDX-License-Identifier: Apache-2.0
//
// Road geometry, vehicle mobility, task arrivals and link bookkeeping for
// one simulated time slot.

#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace risvec {

struct Position {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

double distance(const Position& a, const Position& b);

struct ScenarioConfig {
  std::size_t vehicles = 15;          // K, vehicle users
  std::size_t service_vehicles = 5;   // J
  std::size_t resource_blocks = 10;   // B
  double slot_duration = 1.0;         // seconds
  double speed = 20.0;                // m/s
  double road_length = 300.0;         // m, road runs along +y
  std::vector<double> lane_offsets{0.0, 4.0};
  Position rsu_pos{-10.0, 150.0, 25.0};
  Position ris_pos{10.0, 175.0, 25.0};
  double task_unit_bits = 4.0e5;      // D_k per arrival
  double arrival_mean = 1.0;          // Poisson mean, arrivals per slot
  std::size_t max_users_per_sv = 0;   // U_max; 0 resolves to max(1, K / J)
  std::uint64_t seed = 1;

  std::size_t resolved_max_users() const;
  void validate() const;
};

// Link ids: 2k is vehicle k's V2I link, 2k + 1 its V2V link.
enum class LinkType { V2I = 0, V2V = 1 };

inline std::size_t link_id(std::size_t vehicle, LinkType type) {
  return 2 * vehicle + static_cast<std::size_t>(type);
}

struct ScenarioState {
  std::vector<Position> users;           // K vehicle users
  std::vector<Position> service;         // J service vehicles
  Position rsu;
  Position ris;
  std::vector<std::uint32_t> task_units; // Poisson arrivals this slot
  std::vector<double> task_bits;         // task_units * D_k
  std::vector<std::size_t> sv_of;        // serving SV per user
  std::vector<std::size_t> rb_of;        // RB per link id
  std::size_t slot_index = 0;
  bool overflow_warning = false;

  std::size_t link_count() const { return 2 * users.size(); }
  // Users carrying a task this slot that are assigned to SV j.
  std::size_t active_users_on(std::size_t sv) const;
  std::size_t active_users() const;
};

ScenarioState init_scenario(const ScenarioConfig& cfg);

// Moves every vehicle by speed * slot_duration along +y, wrapping at the
// road end.
ScenarioState advance(ScenarioState state, const ScenarioConfig& cfg);

ScenarioState draw_tasks(ScenarioState state, const ScenarioConfig& cfg,
                         std::mt19937_64& rng);

// Nearest-SV association with capacity U_max. Over-subscribed SVs keep their
// closest requesters and push the rest to each requester's next-nearest SV.
// When every SV is saturated the remaining users spill round-robin over their
// preference lists and overflow_warning is raised.
ScenarioState assign_svs(ScenarioState state, const ScenarioConfig& cfg);

// Round-robin RB allocation in (vehicle, link type) order.
ScenarioState assign_rbs(ScenarioState state, const ScenarioConfig& cfg);

}  // namespace risvec
