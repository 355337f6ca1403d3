// SPDX-License-Identifier: Apache-2.0

#include "risvec/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace risvec {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kSpeedOfLight = 299792458.0;

cplx standard_complex_normal(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  const double re = n(rng);
  const double im = n(rng);
  return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
}

double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  return a;
}

}  // namespace

double RadioConfig::wavelength() const { return kSpeedOfLight / carrier_frequency; }

double RadioConfig::spacing() const {
  return element_spacing > 0.0 ? element_spacing : wavelength() / 2.0;
}

void RadioConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("radio: " + what); };
  if (!(ref_loss > 0.0 && ref_loss <= 1.0)) fail("ref_loss must lie in (0, 1]");
  if (path_exp_direct < 2.0 || path_exp_ris_edge < 2.0 || path_exp_user_ris < 2.0)
    fail("path loss exponents must be >= 2");
  if (!(rician_factor >= 0.0)) fail("rician_factor must be non-negative");
  if (ris_elements == 0) fail("ris_elements must be at least 1");
  if (phase_bits == 0 || phase_bits > 16) fail("phase_bits must lie in [1, 16]");
  if (!(tx_power > 0.0)) fail("tx_power must be positive");
  if (!(noise_power > 0.0)) fail("noise_power must be positive");
  if (!(bandwidth > 0.0)) fail("bandwidth must be positive");
  if (!(carrier_frequency > 0.0)) fail("carrier_frequency must be positive");
  if (element_spacing < 0.0) fail("element_spacing must be non-negative");
}

double discrete_phase(unsigned index, unsigned bits) {
  return kTwoPi * static_cast<double>(index) / static_cast<double>(1u << bits);
}

RisPhaseConfig RisPhaseConfig::uniform(std::size_t n, unsigned bits, double amplitude) {
  RisPhaseConfig c;
  c.phase_index.assign(n, 0);
  c.amplitude.assign(n, amplitude);
  c.bits = bits;
  return c;
}

double RisPhaseConfig::phase(std::size_t n) const { return discrete_phase(phase_index[n], bits); }

void RisPhaseConfig::validate() const {
  if (amplitude.size() != phase_index.size())
    throw std::invalid_argument("RIS config: amplitude and phase lengths differ");
  const unsigned levels = 1u << bits;
  for (std::size_t n = 0; n < size(); ++n) {
    if (phase_index[n] >= levels)
      throw std::invalid_argument("RIS config: phase index out of range");
    if (!(amplitude[n] >= 0.0 && amplitude[n] <= 1.0))
      throw std::invalid_argument("RIS config: amplitude outside [0, 1]");
  }
}

CVec steering_vector(double angle, std::size_t n, double spacing, double wavelength) {
  CVec v(n);
  const double step = -kTwoPi / wavelength * spacing * std::sin(angle);
  for (std::size_t i = 0; i < n; ++i) v[i] = std::polar(1.0, step * static_cast<double>(i));
  return v;
}

double large_scale_amplitude(double dist, double path_exp, double ref_loss) {
  const double d = std::max(dist, 1.0);
  return std::sqrt(ref_loss * std::pow(d, -path_exp));
}

cplx direct_gain(double dist, double path_exp, double ref_loss, std::mt19937_64& rng) {
  return large_scale_amplitude(dist, path_exp, ref_loss) * standard_complex_normal(rng);
}

CVec rician_los_gain(double dist, double path_exp, double ref_loss, double kappa,
                     std::span<const cplx> steering) {
  const double los = std::isinf(kappa) ? 1.0 : std::sqrt(kappa / (1.0 + kappa));
  const double amp = large_scale_amplitude(dist, path_exp, ref_loss) * los;
  CVec h(steering.begin(), steering.end());
  for (auto& e : h) e *= amp;
  return h;
}

cplx cascade(std::span<const cplx> h_rj, const RisPhaseConfig& phases,
             std::span<const cplx> h_kr) {
  if (h_rj.size() != phases.size() || h_kr.size() != phases.size())
    throw std::invalid_argument("cascade: channel and RIS lengths differ");
  cplx acc{0.0, 0.0};
  for (std::size_t n = 0; n < phases.size(); ++n) {
    if (phases.amplitude[n] == 0.0) continue;
    acc += std::conj(h_rj[n]) * std::polar(phases.amplitude[n], phases.phase(n)) * h_kr[n];
  }
  return acc;
}

std::vector<unsigned> co_phase(cplx direct, std::span<const cplx> h_rj,
                               std::span<const cplx> h_kr, unsigned bits) {
  if (h_rj.size() != h_kr.size()) throw std::invalid_argument("co_phase: length mismatch");
  const unsigned levels = 1u << bits;
  const double step = kTwoPi / levels;
  std::vector<unsigned> idx(h_rj.size());
  for (std::size_t n = 0; n < h_rj.size(); ++n) {
    const double target = wrap_angle(std::arg(direct) - std::arg(std::conj(h_rj[n]) * h_kr[n]));
    idx[n] = static_cast<unsigned>(std::lround(target / step)) % levels;
  }
  return idx;
}

double sinr(double tx_power, cplx direct, cplx cascade_term, double interference,
            double noise_power) {
  return tx_power * std::norm(direct + cascade_term) / (interference + noise_power);
}

double ris_angle(const Position& ris, const Position& other) {
  const double d = distance(ris, other);
  if (d == 0.0) return 0.0;
  return std::asin(std::clamp((other.y - ris.y) / d, -1.0, 1.0));
}

SlotChannels draw_slot_channels(const ScenarioState& state, const RadioConfig& radio,
                                std::uint64_t slot_seed) {
  const std::size_t K = state.users.size();
  const std::size_t N = radio.ris_elements;
  const double lambda = radio.wavelength();
  const double spacing = radio.spacing();
  const double nlos_amp =
      std::isinf(radio.rician_factor) ? 0.0 : std::sqrt(1.0 / (1.0 + radio.rician_factor));

  SlotChannels ch;
  ch.direct.resize(2 * K);
  ch.ris_to_rx.resize(2 * K);
  ch.user_to_ris.resize(2 * K);
  ch.aoa.resize(K);
  ch.rb_of = state.rb_of;
  ch.ris_enabled.resize(2 * K);

  for (std::size_t k = 0; k < K; ++k) {
    const Position& user = state.users[k];
    const double d_kr = distance(user, state.ris);
    ch.aoa[k] = ris_angle(state.ris, user);
    const CVec a_kr = steering_vector(ch.aoa[k], N, spacing, lambda);
    const CVec h_kr = rician_los_gain(d_kr, radio.path_exp_user_ris, radio.ref_loss,
                                      radio.rician_factor, a_kr);

    for (LinkType type : {LinkType::V2I, LinkType::V2V}) {
      const std::size_t l = link_id(k, type);
      const Position& rx = type == LinkType::V2I ? state.rsu : state.service[state.sv_of[k]];
      std::seed_seq seq{static_cast<std::uint32_t>(slot_seed),
                        static_cast<std::uint32_t>(slot_seed >> 32),
                        static_cast<std::uint32_t>(l)};
      std::mt19937_64 rng(seq);
      ch.direct[l] = direct_gain(distance(user, rx), radio.path_exp_direct, radio.ref_loss, rng);

      const double d_rj = distance(state.ris, rx);
      const CVec a_rj = steering_vector(ris_angle(state.ris, rx), N, spacing, lambda);
      CVec h_rj = rician_los_gain(d_rj, radio.path_exp_ris_edge, radio.ref_loss,
                                  radio.rician_factor, a_rj);
      CVec h_kr_l = h_kr;
      if (radio.nlos && nlos_amp > 0.0) {
        const double a1 = large_scale_amplitude(d_rj, radio.path_exp_ris_edge, radio.ref_loss);
        const double a2 = large_scale_amplitude(d_kr, radio.path_exp_user_ris, radio.ref_loss);
        for (std::size_t n = 0; n < N; ++n) {
          h_rj[n] += a1 * nlos_amp * standard_complex_normal(rng);
          h_kr_l[n] += a2 * nlos_amp * standard_complex_normal(rng);
        }
      }
      ch.ris_to_rx[l] = std::move(h_rj);
      ch.user_to_ris[l] = std::move(h_kr_l);
      ch.ris_enabled[l] = radio.ris_links == RisServing::All ||
                          (radio.ris_links == RisServing::V2IOnly && type == LinkType::V2I) ||
                          (radio.ris_links == RisServing::V2VOnly && type == LinkType::V2V);
    }
  }
  return ch;
}

ChannelReport evaluate_channels(const SlotChannels& ch, const RadioConfig& radio,
                                const RisPhaseConfig& phases) {
  const std::size_t L = ch.direct.size();
  ChannelReport r;
  r.direct = ch.direct;
  r.cascade.assign(L, cplx{0.0, 0.0});
  r.sinr.resize(L);
  r.sinr_db.resize(L);

  for (std::size_t l = 0; l < L; ++l) {
    if (ch.ris_enabled[l]) r.cascade[l] = cascade(ch.ris_to_rx[l], phases, ch.user_to_ris[l]);
    // Same-RB interference from every other link, direct gains only.
    double interference = 0.0;
    for (std::size_t m = 0; m < L; ++m)
      if (m != l && ch.rb_of[m] == ch.rb_of[l]) interference += radio.tx_power * std::norm(ch.direct[m]);
    r.sinr[l] = sinr(radio.tx_power, r.direct[l], r.cascade[l], interference, radio.noise_power);
    r.sinr_db[l] = 10.0 * std::log10(r.sinr[l]);
  }
  return r;
}

std::vector<unsigned> cophase_heuristic(const SlotChannels& ch, unsigned bits) {
  const unsigned levels = 1u << bits;
  const std::size_t L = ch.direct.size();
  const std::size_t N = L ? ch.ris_to_rx[0].size() : 0;
  std::vector<unsigned> idx(N, 0);
  for (std::size_t n = 0; n < N; ++n) {
    cplx acc{0.0, 0.0};
    for (std::size_t l = 0; l < L; ++l) {
      if (!ch.ris_enabled[l] || std::norm(ch.direct[l]) == 0.0) continue;
      acc += std::conj(ch.ris_to_rx[l][n]) * ch.user_to_ris[l][n] / ch.direct[l];
    }
    // maximize Re(acc * e^{j theta}) over the discrete set
    double best = -std::numeric_limits<double>::infinity();
    for (unsigned i = 0; i < levels; ++i) {
      const double v = std::real(acc * std::polar(1.0, discrete_phase(i, bits)));
      if (v > best) {
        best = v;
        idx[n] = i;
      }
    }
  }
  return idx;
}

}  // namespace risvec
