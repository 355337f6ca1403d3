// SPDX-License-Identifier: Apache-2.0
//
// Three-path delay model: local execution, V2I offload to the RSU, V2V
// offload to the serving SV. Paths run in parallel, so a vehicle's delay is
// the slowest of the three.

#pragma once

#include <limits>

#include "risvec/semantic.hpp"

namespace risvec {

inline constexpr double kUnusable = std::numeric_limits<double>::infinity();

struct ComputeParams {
  double cycles_per_bit = 1000.0;  // C
  double local_freq = 2e9;         // f_loc, Hz
  double rsu_freq = 6e9;           // F_RSU, Hz, shared by U_0 users
  double sv_freq = 2e9;            // F_SV, Hz, shared by U_j users
  double max_delay = 0.5;          // T_max, seconds

  void validate() const;
};

// Delay each path would take if it carried the whole task; infinity marks an
// unusable path.
struct PathCoefficients {
  double mu_loc = kUnusable;
  double mu_rsu = kUnusable;
  double mu_sv = kUnusable;
};

struct OffloadSplit {
  double rho_loc = 0.0;
  double rho_rsu = 0.0;
  double rho_sv = 0.0;
  double t_star = 0.0;
  bool feasible = true;
};

double local_delay(double rho, double task_bits, double cycles_per_bit, double local_freq);

// Semantic transmission time for a fraction rho of a task: rho * Q * I / R.
double transmission_delay(double rho, double sentences, double units_per_sentence, double rate);

// rho*Q*I/R + rho*D*C/(F/U); server F shared equally by `users`.
double edge_delay(double rho, double sentences, double units_per_sentence, double rate,
                  double task_bits, double cycles_per_bit, double server_freq, double users);

inline double v2i_delay(double rho, double sentences, double units_per_sentence, double rate,
                        double task_bits, double cycles_per_bit, double rsu_freq, double u0) {
  return edge_delay(rho, sentences, units_per_sentence, rate, task_bits, cycles_per_bit,
                    rsu_freq, u0);
}

inline double v2v_delay(double rho, double sentences, double units_per_sentence, double rate,
                        double task_bits, double cycles_per_bit, double sv_freq, double uj) {
  return edge_delay(rho, sentences, units_per_sentence, rate, task_bits, cycles_per_bit,
                    sv_freq, uj);
}

double total_delay(const OffloadSplit& split, const PathCoefficients& paths);

// Q_k = D_k / H
inline double sentences_of(double task_bits, const SemanticParams& sem) {
  return task_bits / sem.bits_per_sentence;
}

PathCoefficients path_coefficients(double task_bits, double rate_v2i, double rate_v2v,
                                   double rsu_users, double sv_users, const SemanticParams& sem,
                                   const ComputeParams& compute);

}  // namespace risvec
