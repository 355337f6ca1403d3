// SPDX-License-Identifier: Apache-2.0

#include "risvec/environment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace risvec {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

double to_unit(double v, double lo, double hi) {
  if (hi <= lo) return 0.0;
  return std::clamp(2.0 * (v - lo) / (hi - lo) - 1.0, -1.0, 1.0);
}

}  // namespace

void SystemConfig::validate() const {
  scenario.validate();
  radio.validate();
  semantic.validate();
  compute.validate();
}

ObsNormalization ObsNormalization::from(const SystemConfig& cfg) {
  ObsNormalization n;
  const auto& lanes = cfg.scenario.lane_offsets;
  n.x_lo = *std::min_element(lanes.begin(), lanes.end());
  n.x_hi = *std::max_element(lanes.begin(), lanes.end());
  n.y_lo = 0.0;
  n.y_hi = cfg.scenario.road_length;
  n.z_lo = 0.0;
  n.z_hi = std::max({cfg.scenario.rsu_pos.z, cfg.scenario.ris_pos.z, 1.0});
  return n;
}

int map_nu(double a, int nu_max) {
  a = std::clamp(a, -1.0, 1.0);
  const double scaled = (a + 1.0) / 2.0 * static_cast<double>(nu_max - 1);
  const int nu = static_cast<int>(std::round(scaled)) + 1;
  return std::clamp(nu, 1, nu_max);
}

unsigned map_phase(double a, unsigned bits) {
  a = std::clamp(a, -1.0, 1.0);
  const unsigned levels = 1u << bits;
  const double target = std::numbers::pi * (a + 1.0);
  unsigned best = 0;
  double best_gap = std::abs(discrete_phase(0, bits) - target);
  for (unsigned i = 1; i < levels; ++i) {
    const double gap = std::abs(discrete_phase(i, bits) - target);
    if (gap < best_gap) {  // strict: ties keep the smaller phase
      best_gap = gap;
      best = i;
    }
  }
  return best;
}

Environment::Environment(SystemConfig cfg, std::shared_ptr<const SemanticTable> table)
    : cfg_(std::move(cfg)), table_(std::move(table)) {
  cfg_.validate();
  if (!table_) throw std::invalid_argument("environment: semantic table required");
  if (table_->nu_max() < cfg_.semantic.nu_max)
    throw std::invalid_argument("environment: semantic table does not cover nu_max");
  norm_ = ObsNormalization::from(cfg_);
  reset(cfg_.scenario.seed);
}

std::vector<double> Environment::reset(std::uint64_t seed) {
  episode_seed_ = seed;
  ScenarioConfig sc = cfg_.scenario;
  sc.seed = seed;
  state_ = init_scenario(sc);
  rng_.seed(splitmix64(seed ^ 0x5EEDull));
  phases_.assign(cfg_.radio.ris_elements, 0);
  prepare_slot();
  return observation();
}

void Environment::prepare_slot() {
  state_ = draw_tasks(std::move(state_), cfg_.scenario, rng_);
  state_ = assign_svs(std::move(state_), cfg_.scenario);
  state_ = assign_rbs(std::move(state_), cfg_.scenario);
  const std::uint64_t slot_seed = splitmix64(episode_seed_ * 0x100000001B3ull + state_.slot_index);
  channels_ = draw_slot_channels(state_, cfg_.radio, slot_seed);
}

RisPhaseConfig Environment::phase_config(const std::vector<unsigned>& idx) const {
  RisPhaseConfig p = RisPhaseConfig::uniform(cfg_.radio.ris_elements, cfg_.radio.phase_bits);
  if (idx.size() != p.size()) throw std::invalid_argument("decision: wrong number of phases");
  p.phase_index = idx;
  p.validate();
  return p;
}

SlotOutcome Environment::evaluate(const Decision& d) const {
  const std::size_t K = cfg_.scenario.vehicles;
  if (d.nu_v2i.size() != K || d.nu_v2v.size() != K)
    throw std::invalid_argument("decision: wrong number of symbol counts");
  const RisPhaseConfig phases = phase_config(d.phase_index);
  const ChannelReport report = evaluate_channels(channels_, cfg_.radio, phases);
  const auto& sem = cfg_.semantic;

  SlotOutcome out;
  out.phase_index = d.phase_index;
  out.vehicle_delay.assign(K, 0.0);
  out.splits.assign(K, OffloadSplit{});
  out.paths.assign(K, PathCoefficients{});
  out.executed_nu.assign(2 * K, 1);
  out.delta.assign(2 * K, 0.0);
  out.sinr_db = report.sinr_db;
  out.link_usable.assign(2 * K, false);
  out.active_vehicles = state_.active_users();

  std::vector<double> rate(2 * K, 0.0);
  for (std::size_t k = 0; k < K; ++k) {
    const bool active = state_.task_bits[k] > 0.0;
    for (LinkType type : {LinkType::V2I, LinkType::V2V}) {
      const std::size_t l = link_id(k, type);
      int nu = type == LinkType::V2I ? d.nu_v2i[k] : d.nu_v2v[k];
      if (nu < 1 || nu > sem.nu_max) throw std::out_of_range("decision: nu outside [1, nu_max]");
      const double g_db = report.sinr_db[l];
      double delta = table_->similarity(g_db, nu);
      bool usable = delta >= sem.similarity_threshold;
      if (!usable) {
        // Project up to the smallest nu meeting the threshold when one exists.
        for (int v = nu + 1; v <= sem.nu_max; ++v) {
          const double dv = table_->similarity(g_db, v);
          if (dv >= sem.similarity_threshold) {
            nu = v;
            delta = dv;
            usable = true;
            break;
          }
        }
      }
      out.executed_nu[l] = nu;
      out.delta[l] = delta;
      out.link_usable[l] = usable;
      if (usable) rate[l] = semantic_rate(sem, cfg_.radio.bandwidth, nu, delta);
      else if (active) ++out.c3_violations;
    }
  }

  const double u0 = static_cast<double>(out.active_vehicles);
  std::vector<double> sv_users(cfg_.scenario.service_vehicles, 0.0);
  for (std::size_t j = 0; j < sv_users.size(); ++j)
    sv_users[j] = static_cast<double>(state_.active_users_on(j));

  double v2i_sum = 0.0, v2v_sum = 0.0;
  std::size_t v2i_n = 0, v2v_n = 0;
  for (std::size_t k = 0; k < K; ++k) {
    const double bits = state_.task_bits[k];
    if (bits <= 0.0) continue;
    PathCoefficients pc = path_coefficients(bits, rate[link_id(k, LinkType::V2I)],
                                            rate[link_id(k, LinkType::V2V)], u0,
                                            sv_users[state_.sv_of[k]], sem, cfg_.compute);
    const LpOutcome lp = solve_lp(build_standard_form(pc, cfg_.compute.max_delay));
    out.paths[k] = pc;
    out.splits[k] = lp.split;
    out.vehicle_delay[k] = lp.split.t_star;
    out.total_delay += lp.split.t_star;
    if (lp.status == SolveStatus::Infeasible) ++out.deadline_violations;
    if (lp.status == SolveStatus::NonConvergence || lp.status == SolveStatus::AllPathsUnusable)
      ++out.solver_failures;

    const double q = sentences_of(bits, sem);
    if (lp.split.rho_rsu > 0.0) {
      v2i_sum += transmission_delay(lp.split.rho_rsu, q, sem.units_per_sentence,
                                    rate[link_id(k, LinkType::V2I)]);
      ++v2i_n;
    }
    if (lp.split.rho_sv > 0.0) {
      v2v_sum += transmission_delay(lp.split.rho_sv, q, sem.units_per_sentence,
                                    rate[link_id(k, LinkType::V2V)]);
      ++v2v_n;
    }
  }
  out.mean_v2i_delay = v2i_n ? v2i_sum / static_cast<double>(v2i_n) : 0.0;
  out.mean_v2v_delay = v2v_n ? v2v_sum / static_cast<double>(v2v_n) : 0.0;
  return out;
}

SlotOutcome Environment::step(const Decision& decision) {
  SlotOutcome out = evaluate(decision);
  commit(decision);
  return out;
}

void Environment::commit(const Decision& decision) {
  if (decision.phase_index.size() != cfg_.radio.ris_elements)
    throw std::invalid_argument("decision: wrong number of phases");
  phases_ = decision.phase_index;
  state_ = advance(std::move(state_), cfg_.scenario);
  prepare_slot();
}

std::vector<double> Environment::observation() const {
  std::vector<double> obs;
  obs.reserve(obs_dim());
  auto push_pos = [&](const Position& p) {
    obs.push_back(to_unit(p.x, norm_.x_lo, norm_.x_hi));
    obs.push_back(to_unit(p.y, norm_.y_lo, norm_.y_hi));
    obs.push_back(to_unit(p.z, norm_.z_lo, norm_.z_hi));
  };
  for (const auto& p : state_.users) push_pos(p);
  for (const auto& p : state_.service) push_pos(p);
  for (double a : channels_.aoa) obs.push_back(std::clamp(a / norm_.angle_scale, -1.0, 1.0));
  const double top = static_cast<double>(cfg_.radio.phase_levels() - 1);
  for (unsigned i : phases_) obs.push_back(to_unit(static_cast<double>(i), 0.0, top));
  const ChannelReport r = evaluate_channels(channels_, cfg_.radio, phase_config(phases_));
  for (double g : r.sinr_db) obs.push_back(to_unit(g, norm_.sinr_lo_db, norm_.sinr_hi_db));
  return obs;
}

Decision Environment::decode(std::span<const double> a) const {
  const std::size_t N = cfg_.radio.ris_elements;
  const std::size_t K = cfg_.scenario.vehicles;
  if (a.size() != action_dim()) throw std::invalid_argument("decode: wrong action length");
  Decision d;
  d.phase_index.resize(N);
  d.nu_v2i.resize(K);
  d.nu_v2v.resize(K);
  for (std::size_t n = 0; n < N; ++n) d.phase_index[n] = map_phase(a[n], cfg_.radio.phase_bits);
  for (std::size_t k = 0; k < K; ++k) {
    d.nu_v2i[k] = map_nu(a[N + k], cfg_.semantic.nu_max);
    d.nu_v2v[k] = map_nu(a[N + K + k], cfg_.semantic.nu_max);
  }
  return d;
}

Decision Environment::heuristic_decision() const {
  const std::size_t K = cfg_.scenario.vehicles;
  Decision d;
  d.phase_index = cophase_heuristic(channels_, cfg_.radio.phase_bits);
  const ChannelReport r = evaluate_channels(channels_, cfg_.radio, phase_config(d.phase_index));
  auto pick = [&](std::size_t l) {
    const auto nu = min_feasible_nu(*table_, r.sinr_db[l], cfg_.semantic.similarity_threshold);
    return nu && *nu <= cfg_.semantic.nu_max ? *nu : 1;
  };
  d.nu_v2i.resize(K);
  d.nu_v2v.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    d.nu_v2i[k] = pick(link_id(k, LinkType::V2I));
    d.nu_v2v[k] = pick(link_id(k, LinkType::V2V));
  }
  return d;
}

std::size_t Environment::obs_dim() const {
  const std::size_t K = cfg_.scenario.vehicles;
  const std::size_t J = cfg_.scenario.service_vehicles;
  return 3 * (K + J) + K + cfg_.radio.ris_elements + 2 * K;
}

std::size_t Environment::action_dim() const {
  return cfg_.radio.ris_elements + 2 * cfg_.scenario.vehicles;
}

}  // namespace risvec
