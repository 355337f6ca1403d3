// SPDX-License-Identifier: Apache-2.0

#include "risvec/lp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace risvec::lp {

namespace {

constexpr double kEps = 1e-11;

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_((rows + 1) * (cols + 1), 0.0), basis_(rows, 0) {}

  double& at(std::size_t r, std::size_t c) { return data_[r * (cols_ + 1) + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * (cols_ + 1) + c]; }
  double& rhs(std::size_t r) { return at(r, cols_); }
  double rhs(std::size_t r) const { return at(r, cols_); }
  // Objective row lives at index rows_.
  double& cost(std::size_t c) { return at(rows_, c); }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::vector<std::size_t>& basis() { return basis_; }

  void pivot(std::size_t pr, std::size_t pc) {
    const double p = at(pr, pc);
    for (std::size_t c = 0; c <= cols_; ++c) at(pr, c) /= p;
    for (std::size_t r = 0; r <= rows_; ++r) {
      if (r == pr) continue;
      const double f = at(r, pc);
      if (f == 0.0) continue;
      for (std::size_t c = 0; c <= cols_; ++c) at(r, c) -= f * at(pr, c);
      at(r, pc) = 0.0;
    }
    basis_[pr] = pc;
  }

  // Runs simplex iterations on the current objective row over the columns
  // [0, allowed). Returns false on unboundedness.
  Status run(std::size_t allowed, std::size_t& iterations, std::size_t cap) {
    while (true) {
      std::size_t enter = cols_;
      for (std::size_t c = 0; c < allowed; ++c) {
        if (cost(c) < -kEps) {
          enter = c;
          break;
        }
      }
      if (enter == cols_) return Status::Optimal;
      if (iterations >= cap) return Status::IterationLimit;

      std::size_t leave = rows_;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < rows_; ++r) {
        const double a = at(r, enter);
        if (a <= kEps) continue;
        const double ratio = rhs(r) / a;
        if (ratio < best - kEps || (std::abs(ratio - best) <= kEps && basis_[r] < basis_[leave])) {
          best = ratio;
          leave = r;
        }
      }
      if (leave == rows_) return Status::Unbounded;
      pivot(leave, enter);
      ++iterations;
    }
  }

 private:
  std::size_t rows_, cols_;
  std::vector<double> data_;
  std::vector<std::size_t> basis_;
};

}  // namespace

const char* to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
    case Status::IterationLimit: return "iteration-limit";
  }
  return "unknown";
}

Solution solve(const LinearProgram& p, std::size_t max_iterations) {
  const std::size_t n = p.c.size();
  if (p.lb.size() != n || p.ub.size() != n || p.a_ub.size() != p.b_ub.size() ||
      p.a_eq.size() != p.b_eq.size())
    throw std::invalid_argument("lp: inconsistent dimensions");

  Solution sol;
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(p.lb[j])) throw std::invalid_argument("lp: lower bounds must be finite");
    if (p.ub[j] < p.lb[j]) return sol;  // infeasible bounds
  }

  // Shift x = y + lb and collect rows as (coefficients, rhs, is_equality).
  struct Row {
    std::vector<double> a;
    double b;
    bool eq;
  };
  std::vector<Row> rows;
  auto shifted = [&](const std::vector<double>& a, double b) {
    if (a.size() != n) throw std::invalid_argument("lp: row length mismatch");
    for (std::size_t j = 0; j < n; ++j) b -= a[j] * p.lb[j];
    return b;
  };
  for (std::size_t i = 0; i < p.a_ub.size(); ++i)
    rows.push_back({p.a_ub[i], shifted(p.a_ub[i], p.b_ub[i]), false});
  for (std::size_t j = 0; j < n; ++j) {
    if (std::isinf(p.ub[j])) continue;
    std::vector<double> a(n, 0.0);
    a[j] = 1.0;
    rows.push_back({std::move(a), p.ub[j] - p.lb[j], false});
  }
  for (std::size_t i = 0; i < p.a_eq.size(); ++i)
    rows.push_back({p.a_eq[i], shifted(p.a_eq[i], p.b_eq[i]), true});

  const std::size_t m = rows.size();
  std::size_t slacks = 0;
  for (const auto& r : rows) slacks += r.eq ? 0 : 1;
  std::size_t artificials = 0;
  for (const auto& r : rows) artificials += (r.eq || r.b < 0.0) ? 1 : 0;

  const std::size_t slack0 = n;
  const std::size_t art0 = n + slacks;
  Tableau t(m, n + slacks + artificials);

  std::size_t s = 0, a = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double sign = rows[i].b < 0.0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < n; ++j) t.at(i, j) = sign * rows[i].a[j];
    t.rhs(i) = sign * rows[i].b;
    if (!rows[i].eq) {
      t.at(i, slack0 + s) = sign;
      if (sign > 0.0) t.basis()[i] = slack0 + s;
      ++s;
    }
    if (rows[i].eq || sign < 0.0) {
      t.at(i, art0 + a) = 1.0;
      t.basis()[i] = art0 + a;
      ++a;
    }
  }

  // Phase 1: minimize the sum of artificials.
  if (artificials > 0) {
    for (std::size_t i = 0; i < m; ++i) {
      if (t.basis()[i] < art0) continue;
      for (std::size_t c = 0; c <= t.cols(); ++c)
        if (c < art0 || c == t.cols()) t.at(m, c) -= t.at(i, c);
    }
    const Status st = t.run(t.cols(), sol.iterations, max_iterations);
    if (st == Status::IterationLimit) {
      sol.status = st;
      return sol;
    }
    if (-t.rhs(m) > 1e-9) return sol;  // infeasible

    // Drive zero-valued artificials out of the basis where possible.
    for (std::size_t i = 0; i < m; ++i) {
      if (t.basis()[i] < art0) continue;
      for (std::size_t c = 0; c < art0; ++c) {
        if (std::abs(t.at(i, c)) > kEps) {
          t.pivot(i, c);
          break;
        }
      }
    }
  }

  // Phase 2 objective row: reduced costs c_j - c_B B^-1 A_j.
  for (std::size_t c = 0; c <= t.cols(); ++c) t.at(m, c) = 0.0;
  for (std::size_t j = 0; j < n; ++j) t.at(m, j) = p.c[j];
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t bj = t.basis()[i];
    if (bj >= n) continue;
    const double cb = p.c[bj];
    if (cb == 0.0) continue;
    for (std::size_t c = 0; c <= t.cols(); ++c) t.at(m, c) -= cb * t.at(i, c);
  }
  const Status st = t.run(art0, sol.iterations, max_iterations);
  sol.status = st;
  if (st != Status::Optimal) return sol;

  sol.x.assign(p.lb.begin(), p.lb.end());
  for (std::size_t i = 0; i < m; ++i)
    if (t.basis()[i] < n) sol.x[t.basis()[i]] += t.rhs(i);
  sol.objective = 0.0;
  for (std::size_t j = 0; j < n; ++j) sol.objective += p.c[j] * sol.x[j];
  return sol;
}

}  // namespace risvec::lp
