// SPDX-License-Identifier: Apache-2.0
//
// Dense two-phase simplex for small linear programs of the form
//   min c'x  s.t.  A_ub x <= b_ub,  A_eq x = b_eq,  lb <= x <= ub.

#pragma once

#include <cstddef>
#include <vector>

namespace risvec::lp {

struct LinearProgram {
  std::vector<double> c;
  std::vector<std::vector<double>> a_ub;
  std::vector<double> b_ub;
  std::vector<std::vector<double>> a_eq;
  std::vector<double> b_eq;
  std::vector<double> lb;  // must be finite
  std::vector<double> ub;  // +inf allowed
};

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

struct Solution {
  Status status = Status::Infeasible;
  std::vector<double> x;
  double objective = 0.0;
  std::size_t iterations = 0;
};

// Bland's rule keeps the method finite; the cap only guards against
// numerical trouble.
Solution solve(const LinearProgram& problem, std::size_t max_iterations = 10000);

const char* to_string(Status s);

}  // namespace risvec::lp
