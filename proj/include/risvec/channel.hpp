// SPDX-License-Identifier: Apache-2.0
//
// Direct and RIS-cascaded channel gains and per-link SINR with resource-block
// reuse interference.

#pragma once

#include <complex>
#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "risvec/scenario.hpp"

namespace risvec {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;

enum class RisServing { All, V2IOnly, V2VOnly };

struct RadioConfig {
  double ref_loss = 1e-3;          // l, linear gain at d0 = 1 m
  double path_exp_direct = 3.5;    // eta_kj
  double path_exp_ris_edge = 2.2;  // eta_rj
  double path_exp_user_ris = 2.2;  // eta_kr
  double rician_factor = 3.0;      // kappa
  double carrier_frequency = 5.9e9;
  double element_spacing = 0.0;    // D_r; 0 means half a wavelength
  std::size_t ris_elements = 36;   // N
  unsigned phase_bits = 2;         // q
  double tx_power = 0.2;           // W
  double noise_power = 1.44e-10;   // W
  double bandwidth = 360e3;        // Hz
  bool nlos = false;               // add the scattered Rician term
  RisServing ris_links = RisServing::All;

  double wavelength() const;
  double spacing() const;
  std::size_t phase_levels() const { return std::size_t{1} << phase_bits; }
  void validate() const;
};

struct RisPhaseConfig {
  std::vector<unsigned> phase_index;  // each in [0, 2^q)
  std::vector<double> amplitude;      // each in [0, 1]
  unsigned bits = 2;

  static RisPhaseConfig uniform(std::size_t n, unsigned bits, double amplitude = 1.0);
  std::size_t size() const { return phase_index.size(); }
  double phase(std::size_t n) const;
  void validate() const;
};

// Member of the discrete phase set for index i at q control bits.
double discrete_phase(unsigned index, unsigned bits);

CVec steering_vector(double angle, std::size_t n, double spacing, double wavelength);

double large_scale_amplitude(double dist, double path_exp, double ref_loss);

// Rayleigh-faded direct gain; distances below 1 m are clamped.
cplx direct_gain(double dist, double path_exp, double ref_loss, std::mt19937_64& rng);

// LoS-only Rician channel: amplitude * sqrt(kappa / (1 + kappa)) * steering.
CVec rician_los_gain(double dist, double path_exp, double ref_loss, double kappa,
                     std::span<const cplx> steering);

// h_rj^H * diag(mu_n exp(j theta_n)) * h_kr
cplx cascade(std::span<const cplx> h_rj, const RisPhaseConfig& phases,
             std::span<const cplx> h_kr);

// Per-element nearest discrete phase aligning each cascade term with the
// direct gain (circular distance).
std::vector<unsigned> co_phase(cplx direct, std::span<const cplx> h_rj,
                               std::span<const cplx> h_kr, unsigned bits);

double sinr(double tx_power, cplx direct, cplx cascade_term, double interference,
            double noise_power);

// Angle off the RIS broadside for a ULA laid along the road (y) axis.
double ris_angle(const Position& ris, const Position& other);

// Everything about a slot's channels that does not depend on the RIS phases.
struct SlotChannels {
  std::vector<cplx> direct;          // per link id
  std::vector<CVec> ris_to_rx;       // h_rj per link id
  std::vector<CVec> user_to_ris;     // h_kr per link id
  std::vector<double> aoa;           // theta_kr per vehicle user
  std::vector<std::size_t> rb_of;    // copy of the RB map
  std::vector<bool> ris_enabled;     // per link id
};

// Draws small-scale fading for every link. The stream is derived from the
// given seed and link index only, so changing N or p keeps the same draws.
SlotChannels draw_slot_channels(const ScenarioState& state, const RadioConfig& radio,
                                std::uint64_t slot_seed);

struct ChannelReport {
  std::vector<cplx> direct;
  std::vector<cplx> cascade;
  std::vector<double> sinr;
  std::vector<double> sinr_db;
};

ChannelReport evaluate_channels(const SlotChannels& ch, const RadioConfig& radio,
                                const RisPhaseConfig& phases);

// System-level co-phasing: each element picks the discrete phase with the
// largest first-order relative gain summed over the RIS-served links.
std::vector<unsigned> cophase_heuristic(const SlotChannels& ch, unsigned bits);

}  // namespace risvec
