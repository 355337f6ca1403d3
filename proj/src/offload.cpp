// SPDX-License-Identifier: Apache-2.0

#include "risvec/offload.hpp"

#include <algorithm>
#include <cmath>

namespace risvec {

LpStandardForm build_standard_form(const PathCoefficients& paths, double max_delay) {
  LpStandardForm f;
  const std::array<double, 3> mu{paths.mu_loc, paths.mu_rsu, paths.mu_sv};
  bool any = false;
  for (std::size_t i = 0; i < 3; ++i) {
    const bool usable = std::isfinite(mu[i]);
    f.a[i] = {0.0, 0.0, 0.0, -1.0};
    f.a[i][i] = usable ? mu[i] : 0.0;
    f.ub[i] = usable ? 1.0 : 0.0;
    any = any || usable;
  }
  f.ub[3] = max_delay;
  f.all_paths_unusable = !any;
  return f;
}

namespace {

lp::LinearProgram to_program(const LpStandardForm& f, double t_upper) {
  lp::LinearProgram p;
  p.c.assign(f.c.begin(), f.c.end());
  for (std::size_t i = 0; i < 3; ++i) {
    p.a_ub.emplace_back(f.a[i].begin(), f.a[i].end());
    p.b_ub.push_back(f.b[i]);
  }
  p.a_eq.emplace_back(f.a_eq.begin(), f.a_eq.end());
  p.b_eq.push_back(f.b_eq);
  p.lb.assign(f.lb.begin(), f.lb.end());
  p.ub.assign(f.ub.begin(), f.ub.end());
  p.ub[3] = t_upper;
  return p;
}

OffloadSplit split_from(const lp::Solution& s, bool feasible) {
  OffloadSplit out;
  out.rho_loc = std::clamp(s.x[0], 0.0, 1.0);
  out.rho_rsu = std::clamp(s.x[1], 0.0, 1.0);
  out.rho_sv = std::clamp(s.x[2], 0.0, 1.0);
  out.t_star = s.x[3];
  out.feasible = feasible;
  return out;
}

}  // namespace

LpOutcome solve_lp(const LpStandardForm& form) {
  LpOutcome out;
  if (form.all_paths_unusable) {
    out.status = SolveStatus::AllPathsUnusable;
    out.split = {0.0, 0.0, 0.0, kUnusable, false};
    return out;
  }

  lp::Solution s = lp::solve(to_program(form, form.ub[3]));
  if (s.status == lp::Status::Optimal) {
    out.split = split_from(s, true);
    return out;
  }
  if (s.status == lp::Status::IterationLimit) {
    out.status = SolveStatus::NonConvergence;
    out.split = {0.0, 0.0, 0.0, kUnusable, false};
    return out;
  }

  // Over the delay budget: report the unconstrained optimum.
  s = lp::solve(to_program(form, kUnusable));
  if (s.status != lp::Status::Optimal) {
    out.status = SolveStatus::NonConvergence;
    out.split = {0.0, 0.0, 0.0, kUnusable, false};
    return out;
  }
  out.status = SolveStatus::Infeasible;
  out.split = split_from(s, false);
  return out;
}

OffloadSplit closed_form_oracle(const PathCoefficients& paths, double max_delay) {
  const std::array<double, 3> mu{paths.mu_loc, paths.mu_rsu, paths.mu_sv};
  double inv_sum = 0.0;
  for (double m : mu)
    if (std::isfinite(m)) inv_sum += 1.0 / m;
  OffloadSplit s;
  if (inv_sum == 0.0) {
    s.t_star = kUnusable;
    s.feasible = false;
    return s;
  }
  s.t_star = 1.0 / inv_sum;
  auto share = [&](double m) { return std::isfinite(m) ? s.t_star / m : 0.0; };
  s.rho_loc = share(mu[0]);
  s.rho_rsu = share(mu[1]);
  s.rho_sv = share(mu[2]);
  s.feasible = s.t_star <= max_delay;
  return s;
}

}  // namespace risvec
