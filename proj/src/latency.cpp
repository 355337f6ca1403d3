// SPDX-License-Identifier: Apache-2.0

#include "risvec/latency.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace risvec {

void ComputeParams::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("compute: " + what); };
  if (!(cycles_per_bit > 0.0)) fail("cycles_per_bit must be positive");
  if (!(local_freq > 0.0)) fail("local_freq must be positive");
  if (!(rsu_freq > 0.0)) fail("rsu_freq must be positive");
  if (!(sv_freq > 0.0)) fail("sv_freq must be positive");
  if (!(max_delay > 0.0)) fail("max_delay must be positive");
}

double local_delay(double rho, double task_bits, double cycles_per_bit, double local_freq) {
  return rho * task_bits * cycles_per_bit / local_freq;
}

double transmission_delay(double rho, double sentences, double units_per_sentence, double rate) {
  if (rho == 0.0 || sentences == 0.0) return 0.0;
  if (!(rate > 0.0)) return kUnusable;
  return rho * sentences * units_per_sentence / rate;
}

double edge_delay(double rho, double sentences, double units_per_sentence, double rate,
                  double task_bits, double cycles_per_bit, double server_freq, double users) {
  if (rho == 0.0 || task_bits == 0.0) return 0.0;
  const double share = server_freq / std::max(users, 1.0);
  return transmission_delay(rho, sentences, units_per_sentence, rate) +
         rho * task_bits * cycles_per_bit / share;
}

double total_delay(const OffloadSplit& split, const PathCoefficients& paths) {
  auto term = [](double rho, double mu) { return rho == 0.0 ? 0.0 : rho * mu; };
  return std::max({term(split.rho_loc, paths.mu_loc), term(split.rho_rsu, paths.mu_rsu),
                   term(split.rho_sv, paths.mu_sv)});
}

PathCoefficients path_coefficients(double task_bits, double rate_v2i, double rate_v2v,
                                   double rsu_users, double sv_users, const SemanticParams& sem,
                                   const ComputeParams& compute) {
  const double q = sentences_of(task_bits, sem);
  PathCoefficients p;
  p.mu_loc = local_delay(1.0, task_bits, compute.cycles_per_bit, compute.local_freq);
  p.mu_rsu = v2i_delay(1.0, q, sem.units_per_sentence, rate_v2i, task_bits,
                       compute.cycles_per_bit, compute.rsu_freq, rsu_users);
  p.mu_sv = v2v_delay(1.0, q, sem.units_per_sentence, rate_v2v, task_bits,
                      compute.cycles_per_bit, compute.sv_freq, sv_users);
  return p;
}

}  // namespace risvec
