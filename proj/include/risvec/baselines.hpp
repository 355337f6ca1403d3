// SPDX-License-Identifier: Apache-2.0
//
// Metaheuristic baselines searching the same discrete per-slot decision as
// the agent (RIS phase indices + symbol counts), each scored by the LP.

#pragma once

#include <cstddef>
#include <functional>
#include <random>
#include <vector>

#include "risvec/environment.hpp"

namespace risvec {

struct GenomeSpec {
  std::size_t phases = 0;     // N
  unsigned phase_levels = 4;  // 2^q
  std::size_t nus = 0;        // 2K
  int nu_max = 20;

  std::size_t length() const { return phases + nus; }
  static GenomeSpec for_env(const Environment& env);
};

struct Candidate {
  std::vector<unsigned> phase_index;
  std::vector<int> nu;  // K V2I entries then K V2V entries
  double fitness = 0.0; // total slot delay, lower is better
};

bool is_legal(const Candidate& c, const GenomeSpec& spec);
Decision to_decision(const Candidate& c);

using FitnessFn = std::function<double(const Candidate&)>;

// Fitness = total slot delay of the environment's current slot.
FitnessFn slot_fitness(const Environment& env);

struct SearchResult {
  Candidate best;
  std::size_t evaluations = 0;
  std::vector<double> best_history;  // best fitness after each generation
};

struct GaConfig {
  std::size_t population = 50;
  std::size_t tournament = 3;
  double crossover_rate = 0.9;
  double mutation_rate = 0.0;  // 0 means 1 / genome length
  std::size_t elites = 1;
};

// Tournament selection, uniform crossover, per-gene resampling mutation,
// elitism. Spends exactly `budget` fitness evaluations.
SearchResult ga_optimize(const GenomeSpec& spec, const FitnessFn& fitness, std::size_t budget,
                         const GaConfig& cfg, std::mt19937_64& rng);

struct QpsoConfig {
  std::size_t population = 50;
  double beta_start = 1.0;
  double beta_end = 0.5;
};

// Positions and attractors of the swarm after one QPSO move.
struct QpsoIteration {
  std::size_t iteration = 0;
  double beta = 0.0;
  const std::vector<std::vector<double>>* positions = nullptr;
  const std::vector<std::vector<double>>* attractors = nullptr;
};
using QpsoObserver = std::function<void(const QpsoIteration&)>;

// Quantum-behaved PSO on the relaxed genome; positions are rounded to the
// nearest legal gene at evaluation. Spends exactly `budget` evaluations.
SearchResult qpso_optimize(const GenomeSpec& spec, const FitnessFn& fitness, std::size_t budget,
                           const QpsoConfig& cfg, std::mt19937_64& rng,
                           const QpsoObserver& observer = {});

}  // namespace risvec
