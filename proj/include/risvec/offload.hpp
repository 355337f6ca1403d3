// SPDX-License-Identifier: Apache-2.0
//
// Per-vehicle offloading split: the min-max three-path program in matrix
// form, its LP solution, and an independent closed-form optimum.

#pragma once

#include <array>

#include "risvec/latency.hpp"
#include "risvec/lp.hpp"

namespace risvec {

// x = [rho_loc, rho_rsu, rho_sv, T]
struct LpStandardForm {
  std::array<double, 4> c{0.0, 0.0, 0.0, 1.0};
  std::array<std::array<double, 4>, 3> a{};
  std::array<double, 3> b{0.0, 0.0, 0.0};
  std::array<double, 4> a_eq{1.0, 1.0, 1.0, 0.0};
  double b_eq = 1.0;
  std::array<double, 4> lb{0.0, 0.0, 0.0, 0.0};
  std::array<double, 4> ub{1.0, 1.0, 1.0, 0.0};
  bool all_paths_unusable = false;
};

// Unusable (infinite) paths get a zero coefficient and a zero upper bound.
LpStandardForm build_standard_form(const PathCoefficients& paths, double max_delay);

enum class SolveStatus { Optimal, Infeasible, AllPathsUnusable, NonConvergence };

struct LpOutcome {
  OffloadSplit split;
  SolveStatus status = SolveStatus::Optimal;
};

// When T* exceeds T_max the program is re-solved with T unbounded and the
// result is returned with feasible = false.
LpOutcome solve_lp(const LpStandardForm& form);

OffloadSplit closed_form_oracle(const PathCoefficients& paths, double max_delay = kUnusable);

}  // namespace risvec
