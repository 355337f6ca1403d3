// SPDX-License-Identifier: Apache-2.0

#include "risvec/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace risvec {

GenomeSpec GenomeSpec::for_env(const Environment& env) {
  const auto& cfg = env.config();
  return {cfg.radio.ris_elements, static_cast<unsigned>(cfg.radio.phase_levels()),
          2 * cfg.scenario.vehicles, cfg.semantic.nu_max};
}

bool is_legal(const Candidate& c, const GenomeSpec& spec) {
  if (c.phase_index.size() != spec.phases || c.nu.size() != spec.nus) return false;
  for (unsigned p : c.phase_index)
    if (p >= spec.phase_levels) return false;
  for (int v : c.nu)
    if (v < 1 || v > spec.nu_max) return false;
  return true;
}

Decision to_decision(const Candidate& c) {
  const std::size_t k = c.nu.size() / 2;
  Decision d;
  d.phase_index = c.phase_index;
  d.nu_v2i.assign(c.nu.begin(), c.nu.begin() + static_cast<std::ptrdiff_t>(k));
  d.nu_v2v.assign(c.nu.begin() + static_cast<std::ptrdiff_t>(k), c.nu.end());
  return d;
}

FitnessFn slot_fitness(const Environment& env) {
  return [&env](const Candidate& c) { return env.evaluate(to_decision(c)).total_delay; };
}

namespace {

Candidate random_candidate(const GenomeSpec& spec, std::mt19937_64& rng) {
  std::uniform_int_distribution<unsigned> ph(0, spec.phase_levels - 1);
  std::uniform_int_distribution<int> nu(1, spec.nu_max);
  Candidate c;
  c.phase_index.resize(spec.phases);
  c.nu.resize(spec.nus);
  for (auto& p : c.phase_index) p = ph(rng);
  for (auto& v : c.nu) v = nu(rng);
  return c;
}

void check_budget(std::size_t budget, std::size_t population) {
  if (population == 0) throw std::invalid_argument("baseline: population must be positive");
  if (budget < population) throw std::invalid_argument("baseline: budget below population size");
}

const Candidate& best_of(const std::vector<Candidate>& pop) {
  return *std::min_element(pop.begin(), pop.end(), [](const Candidate& a, const Candidate& b) {
    return a.fitness < b.fitness;
  });
}

}  // namespace

SearchResult ga_optimize(const GenomeSpec& spec, const FitnessFn& fitness, std::size_t budget,
                         const GaConfig& cfg, std::mt19937_64& rng) {
  check_budget(budget, cfg.population);
  SearchResult res;
  const std::size_t len = spec.length();
  const double mut = cfg.mutation_rate > 0.0 ? cfg.mutation_rate : 1.0 / static_cast<double>(len);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, cfg.population - 1);
  std::uniform_int_distribution<unsigned> ph(0, spec.phase_levels - 1);
  std::uniform_int_distribution<int> nu(1, spec.nu_max);

  std::vector<Candidate> pop(cfg.population);
  for (auto& c : pop) {
    c = random_candidate(spec, rng);
    c.fitness = fitness(c);
    ++res.evaluations;
  }
  res.best = best_of(pop);
  res.best_history.push_back(res.best.fitness);

  auto tournament = [&]() -> const Candidate& {
    std::size_t w = pick(rng);
    for (std::size_t i = 1; i < cfg.tournament; ++i) {
      const std::size_t c = pick(rng);
      if (pop[c].fitness < pop[w].fitness) w = c;
    }
    return pop[w];
  };

  while (res.evaluations < budget) {
    std::vector<Candidate> sorted = pop;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const Candidate& a, const Candidate& b) { return a.fitness < b.fitness; });
    const std::size_t elites = std::min(cfg.elites, cfg.population);
    std::vector<Candidate> next(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(elites));

    const std::size_t children = std::min(cfg.population - elites, budget - res.evaluations);
    for (std::size_t i = 0; i < children; ++i) {
      const Candidate& a = tournament();
      const Candidate& b = tournament();
      Candidate child = a;
      if (unit(rng) < cfg.crossover_rate) {
        for (std::size_t g = 0; g < spec.phases; ++g)
          if (unit(rng) < 0.5) child.phase_index[g] = b.phase_index[g];
        for (std::size_t g = 0; g < spec.nus; ++g)
          if (unit(rng) < 0.5) child.nu[g] = b.nu[g];
      }
      for (auto& p : child.phase_index)
        if (unit(rng) < mut) p = ph(rng);
      for (auto& v : child.nu)
        if (unit(rng) < mut) v = nu(rng);
      child.fitness = fitness(child);
      ++res.evaluations;
      next.push_back(std::move(child));
    }
    // A budget cut mid-generation refills from the previous ranking.
    for (std::size_t i = elites; next.size() < cfg.population; ++i) next.push_back(sorted[i]);
    pop = std::move(next);
    const Candidate& gen_best = best_of(pop);
    if (gen_best.fitness < res.best.fitness) res.best = gen_best;
    res.best_history.push_back(res.best.fitness);
  }
  return res;
}

SearchResult qpso_optimize(const GenomeSpec& spec, const FitnessFn& fitness, std::size_t budget,
                           const QpsoConfig& cfg, std::mt19937_64& rng,
                           const QpsoObserver& observer) {
  check_budget(budget, cfg.population);
  SearchResult res;
  const std::size_t len = spec.length();
  const std::size_t P = cfg.population;
  std::vector<double> lo(len), hi(len);
  for (std::size_t d = 0; d < len; ++d) {
    if (d < spec.phases) {
      lo[d] = 0.0;
      hi[d] = static_cast<double>(spec.phase_levels - 1);
    } else {
      lo[d] = 1.0;
      hi[d] = static_cast<double>(spec.nu_max);
    }
  }
  auto round_gene = [&](const std::vector<double>& x) {
    Candidate c;
    c.phase_index.resize(spec.phases);
    c.nu.resize(spec.nus);
    for (std::size_t d = 0; d < len; ++d) {
      const double r = std::clamp(std::round(x[d]), lo[d], hi[d]);
      if (d < spec.phases) c.phase_index[d] = static_cast<unsigned>(r);
      else c.nu[d - spec.phases] = static_cast<int>(r);
    }
    return c;
  };

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::vector<double>> x(P, std::vector<double>(len));
  std::vector<std::vector<double>> pbest_x;
  std::vector<Candidate> pbest(P);
  for (std::size_t i = 0; i < P; ++i) {
    for (std::size_t d = 0; d < len; ++d) x[i][d] = lo[d] + (hi[d] - lo[d]) * unit(rng);
    pbest[i] = round_gene(x[i]);
    pbest[i].fitness = fitness(pbest[i]);
    ++res.evaluations;
  }
  pbest_x = x;
  std::size_t g = static_cast<std::size_t>(
      std::min_element(pbest.begin(), pbest.end(),
                       [](const Candidate& a, const Candidate& b) { return a.fitness < b.fitness; }) -
      pbest.begin());
  res.best = pbest[g];
  res.best_history.push_back(res.best.fitness);

  const std::size_t iterations = (budget - P + P - 1) / P;
  std::vector<std::vector<double>> attractor(P, std::vector<double>(len));
  std::vector<double> mbest(len);
  for (std::size_t it = 0; res.evaluations < budget; ++it) {
    const double frac = iterations > 1 ? static_cast<double>(it) / static_cast<double>(iterations - 1) : 0.0;
    const double beta = cfg.beta_start - (cfg.beta_start - cfg.beta_end) * frac;
    std::fill(mbest.begin(), mbest.end(), 0.0);
    for (const auto& p : pbest_x)
      for (std::size_t d = 0; d < len; ++d) mbest[d] += p[d] / static_cast<double>(P);

    for (std::size_t i = 0; i < P; ++i) {
      for (std::size_t d = 0; d < len; ++d) {
        const double phi = unit(rng);
        attractor[i][d] = phi * pbest_x[i][d] + (1.0 - phi) * pbest_x[g][d];
        double u = unit(rng);
        while (u <= 0.0) u = unit(rng);
        const double step = beta * std::abs(mbest[d] - x[i][d]) * std::log(1.0 / u);
        x[i][d] = unit(rng) < 0.5 ? attractor[i][d] + step : attractor[i][d] - step;
        x[i][d] = std::clamp(x[i][d], lo[d], hi[d]);
      }
    }
    if (observer) observer({it, beta, &x, &attractor});

    for (std::size_t i = 0; i < P && res.evaluations < budget; ++i) {
      Candidate c = round_gene(x[i]);
      c.fitness = fitness(c);
      ++res.evaluations;
      if (c.fitness < pbest[i].fitness) {
        pbest[i] = std::move(c);
        pbest_x[i] = x[i];
        if (pbest[i].fitness < pbest[g].fitness) g = i;
      }
    }
    if (pbest[g].fitness < res.best.fitness) res.best = pbest[g];
    res.best_history.push_back(res.best.fitness);
  }
  return res;
}

}  // namespace risvec
