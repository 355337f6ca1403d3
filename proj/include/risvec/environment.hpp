// SPDX-License-Identifier: Apache-2.0
//
// Slot-level simulation environment: scenario + channels + semantic rates +
// per-vehicle offloading LPs. Both the PPO agent and the metaheuristic
// baselines score decisions through Environment::evaluate.

#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <vector>

#include "risvec/channel.hpp"
#include "risvec/latency.hpp"
#include "risvec/offload.hpp"
#include "risvec/scenario.hpp"
#include "risvec/semantic.hpp"

namespace risvec {

struct SystemConfig {
  ScenarioConfig scenario;
  RadioConfig radio;
  SemanticParams semantic;
  ComputeParams compute;

  void validate() const;
};

// Discrete decision for one slot: RIS phase indices plus the symbol counts of
// every V2I and V2V link.
struct Decision {
  std::vector<unsigned> phase_index;  // N
  std::vector<int> nu_v2i;            // K
  std::vector<int> nu_v2v;            // K
};

struct SlotOutcome {
  double total_delay = 0.0;  // sum over vehicles of T_k
  std::vector<double> vehicle_delay;
  std::vector<OffloadSplit> splits;
  std::vector<PathCoefficients> paths;
  std::vector<unsigned> phase_index;
  std::vector<int> executed_nu;   // per link id, after C3 projection
  std::vector<double> delta;      // per link id
  std::vector<double> sinr_db;    // per link id
  std::vector<bool> link_usable;  // per link id
  // Mean transmission delay over vehicles that route data over the link type.
  double mean_v2i_delay = 0.0;
  double mean_v2v_delay = 0.0;
  std::size_t active_vehicles = 0;
  std::size_t c3_violations = 0;       // links of active vehicles with delta < delta_th
  std::size_t deadline_violations = 0; // vehicles with T* > T_max
  std::size_t solver_failures = 0;

  std::size_t violations() const { return c3_violations + deadline_violations + solver_failures; }
  double reward() const { return -total_delay; }
};

// Fixed affine maps used to squash raw observation features into [-1, 1].
struct ObsNormalization {
  double x_lo = 0.0, x_hi = 4.0;
  double y_lo = 0.0, y_hi = 300.0;
  double z_lo = 0.0, z_hi = 25.0;
  double angle_scale = 1.5707963267948966;
  double sinr_lo_db = -30.0, sinr_hi_db = 50.0;

  static ObsNormalization from(const SystemConfig& cfg);
};

class Environment {
 public:
  Environment(SystemConfig cfg, std::shared_ptr<const SemanticTable> table);

  // Starts a fresh episode; the scenario layout, task arrivals and fading are
  // all derived from `seed`.
  std::vector<double> reset(std::uint64_t seed);

  SlotOutcome evaluate(const Decision& decision) const;

  // evaluate() followed by commit().
  SlotOutcome step(const Decision& decision);

  // Applies the decision's RIS phases and moves on to the next slot.
  void commit(const Decision& decision);

  std::vector<double> observation() const;

  // Maps raw actions in [-1, 1]: first N entries to phases, then K V2I and K
  // V2V symbol counts.
  Decision decode(std::span<const double> action) const;

  // Co-phasing heuristic for the RIS plus the cheapest feasible nu per link.
  Decision heuristic_decision() const;

  std::size_t obs_dim() const;
  std::size_t action_dim() const;
  std::size_t vehicles() const { return cfg_.scenario.vehicles; }

  const SystemConfig& config() const { return cfg_; }
  const SemanticTable& table() const { return *table_; }
  const ScenarioState& state() const { return state_; }
  const SlotChannels& channels() const { return channels_; }
  const std::vector<unsigned>& phases() const { return phases_; }
  const ObsNormalization& normalization() const { return norm_; }

 private:
  void prepare_slot();
  RisPhaseConfig phase_config(const std::vector<unsigned>& idx) const;

  SystemConfig cfg_;
  std::shared_ptr<const SemanticTable> table_;
  ObsNormalization norm_;
  ScenarioState state_;
  SlotChannels channels_;
  std::vector<unsigned> phases_;
  std::mt19937_64 rng_;
  std::uint64_t episode_seed_ = 0;
};

// Action mapping onto the discrete sets.
int map_nu(double a, int nu_max);
// Returns the phase index of the member of Phi nearest to pi * (a + 1).
unsigned map_phase(double a, unsigned bits);

}  // namespace risvec
