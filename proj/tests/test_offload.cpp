// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <random>

#include "risvec/lp.hpp"
#include "risvec/offload.hpp"

using namespace risvec;

namespace {

// Brute-force minimum of max(rho_i mu_i) on the simplex grid.
double grid_search(const PathCoefficients& p, double step) {
  const int n = static_cast<int>(std::lround(1.0 / step));
  double best = kUnusable;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; i + j <= n; ++j) {
      const double a = i * step, b = j * step, c = 1.0 - a - b;
      best = std::min(best, total_delay({a, b, c, 0, true}, p));
    }
  return best;
}

OffloadSplit solve(const PathCoefficients& p, double tmax = 1e9) {
  return solve_lp(build_standard_form(p, tmax)).split;
}

}  // namespace

TEST_CASE("standard form construction") {
  const auto f = build_standard_form({2, 3, 6}, 0.5);
  CHECK(f.a[0] == std::array<double, 4>{2, 0, 0, -1});
  CHECK(f.a[1] == std::array<double, 4>{0, 3, 0, -1});
  CHECK(f.a[2] == std::array<double, 4>{0, 0, 6, -1});
  CHECK(f.c == std::array<double, 4>{0, 0, 0, 1});
  CHECK(f.a_eq == std::array<double, 4>{1, 1, 1, 0});
  CHECK(f.ub == std::array<double, 4>{1, 1, 1, 0.5});
  const auto g = build_standard_form({2, 3, kUnusable}, 0.5);
  CHECK(g.ub[2] == 0.0);
  CHECK_FALSE(g.all_paths_unusable);
  CHECK(build_standard_form({kUnusable, kUnusable, kUnusable}, 0.5).all_paths_unusable);
}

TEST_CASE("LP spot values") {
  auto s = solve({1, 1, 1});
  CHECK(s.t_star == doctest::Approx(1.0 / 3));
  CHECK(s.rho_loc == doctest::Approx(1.0 / 3));

  s = solve({2, 3, 6});
  CHECK(s.t_star == doctest::Approx(1.0));
  CHECK(s.rho_loc == doctest::Approx(0.5));
  CHECK(s.rho_rsu == doctest::Approx(1.0 / 3));
  CHECK(s.rho_sv == doctest::Approx(1.0 / 6));
  CHECK(grid_search({2, 3, 6}, 1e-3) == doctest::Approx(1.0).epsilon(2e-3));

  s = solve({0.2, 0.4, 0.4});
  CHECK(s.t_star == doctest::Approx(0.1));
  CHECK(s.rho_loc == doctest::Approx(0.5));
  CHECK(s.rho_rsu == doctest::Approx(0.25));
  CHECK(s.rho_sv == doctest::Approx(0.25));
  CHECK(grid_search({0.2, 0.4, 0.4}, 1e-3) == doctest::Approx(0.1).epsilon(2e-3));

  s = solve({2, 3, kUnusable});
  CHECK(s.t_star == doctest::Approx(1.2));
  CHECK(s.rho_sv == 0.0);

  s = solve({kUnusable, 0.7, kUnusable});
  CHECK(s.t_star == doctest::Approx(0.7));
  CHECK(s.rho_rsu == doctest::Approx(1.0));
}

TEST_CASE("LP agrees with the closed form on random triples") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> e(-3.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const PathCoefficients p{std::pow(10.0, e(rng)), std::pow(10.0, e(rng)), std::pow(10.0, e(rng))};
    const auto lp = solve(p);
    const auto cf = closed_form_oracle(p);
    REQUIRE(std::abs(lp.t_star - cf.t_star) <= 1e-6);
    CHECK(std::abs(lp.rho_loc + lp.rho_rsu + lp.rho_sv - 1.0) <= 1e-9);
    CHECK(std::abs(lp.rho_loc * p.mu_loc - lp.t_star) <= 1e-6);
    CHECK(std::abs(lp.rho_rsu * p.mu_rsu - lp.t_star) <= 1e-6);
    CHECK(std::abs(lp.rho_sv * p.mu_sv - lp.t_star) <= 1e-6);
    CHECK(lp.t_star <= std::min({p.mu_loc, p.mu_rsu, p.mu_sv}) + 1e-12);
  }
}

TEST_CASE("deadline feasibility flag") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> e(-3.0, 1.0);
  for (int i = 0; i < 300; ++i) {
    const PathCoefficients p{std::pow(10.0, e(rng)), std::pow(10.0, e(rng)), std::pow(10.0, e(rng))};
    const auto out = solve_lp(build_standard_form(p, 0.5));
    const auto cf = closed_form_oracle(p, 0.5);
    CHECK(out.split.feasible == cf.feasible);
    CHECK((out.status == SolveStatus::Infeasible) == !cf.feasible);
    // infeasible slots still carry the unconstrained optimum
    CHECK(out.split.t_star == doctest::Approx(cf.t_star).epsilon(1e-9));
  }
  const auto none = solve_lp(build_standard_form({kUnusable, kUnusable, kUnusable}, 0.5));
  CHECK(none.status == SolveStatus::AllPathsUnusable);
  CHECK_FALSE(none.split.feasible);
}

TEST_CASE("generic simplex") {
  using namespace risvec::lp;
  SUBCASE("textbook maximization") {
    // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36
    LinearProgram p{{-3, -5}, {{1, 0}, {0, 2}, {3, 2}}, {4, 12, 18}, {}, {}, {0, 0},
                    {kUnusable, kUnusable}};
    const auto s = risvec::lp::solve(p);
    REQUIRE(s.status == Status::Optimal);
    CHECK(s.x[0] == doctest::Approx(2));
    CHECK(s.x[1] == doctest::Approx(6));
    CHECK(s.objective == doctest::Approx(-36));
  }
  SUBCASE("infeasible") {
    LinearProgram p{{1}, {{1}}, {-1}, {}, {}, {0}, {kUnusable}};
    CHECK(risvec::lp::solve(p).status == Status::Infeasible);
  }
  SUBCASE("unbounded") {
    LinearProgram p{{-1, 0}, {{0, 1}}, {1}, {}, {}, {0, 0}, {kUnusable, kUnusable}};
    CHECK(risvec::lp::solve(p).status == Status::Unbounded);
  }
  SUBCASE("equality and shifted bounds") {
    // min x + 2y, x + y = 3, 1 <= x <= 2, y >= 0 -> x = 2, y = 1
    LinearProgram p{{1, 2}, {}, {}, {{1, 1}}, {3}, {1, 0}, {2, kUnusable}};
    const auto s = risvec::lp::solve(p);
    REQUIRE(s.status == Status::Optimal);
    CHECK(s.x[0] == doctest::Approx(2));
    CHECK(s.x[1] == doctest::Approx(1));
  }
}
