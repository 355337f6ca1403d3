// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <stdexcept>

#include <random>

#include "risvec/latency.hpp"
#include "risvec/semantic.hpp"

using namespace risvec;

TEST_CASE("local delay") {
  CHECK(local_delay(1.0, 4e5, 1000, 2e9) == doctest::Approx(0.2));
  CHECK(local_delay(0.0, 4e5, 1000, 2e9) == 0.0);
  CHECK(local_delay(0.3, 4e5, 1000, 2e9) == doctest::Approx(0.3 * 0.2));
}

TEST_CASE("edge delays") {
  SemanticParams sem;
  const double q = sentences_of(4e5, sem);
  CHECK(q == doctest::Approx(333.3333333));
  CHECK(v2i_delay(0.0, q, 100, 405000, 4e5, 1000, 6e9, 3) == 0.0);
  CHECK(v2v_delay(0.0, q, 100, 405000, 4e5, 1000, 2e9, 3) == 0.0);

  // compute term only (rate effectively infinite)
  CHECK(v2v_delay(1.0, q, 100, 1e300, 4e5, 1000, 2e9, 1) == doctest::Approx(0.2));
  const double c1 = v2i_delay(1.0, q, 100, 1e300, 4e5, 1000, 6e9, 2);
  const double c2 = v2i_delay(1.0, q, 100, 1e300, 4e5, 1000, 6e9, 4);
  CHECK(c2 == doctest::Approx(2 * c1));

  CHECK(v2i_delay(0.7, q, 100, 3e5, 4e5, 1000, 6e9, 3) ==
        v2v_delay(0.7, q, 100, 3e5, 4e5, 1000, 2e9, 1));
  CHECK(transmission_delay(1.0, q, 100, 0.0) == kUnusable);
}

TEST_CASE("path coefficients") {
  SemanticParams sem;
  ComputeParams cp;
  const auto p = path_coefficients(4e5, 405000, 405000, 3, 1, sem, cp);
  CHECK(p.mu_loc == doctest::Approx(0.2));
  // symmetric: F_RSU / U_0 = F_SV / U_j
  CHECK(p.mu_rsu == doctest::Approx(p.mu_sv));
  // component sum of transmission and compute at rho = 1
  const double q = 4e5 / 1200.0;
  CHECK(p.mu_rsu == doctest::Approx(q * 100 / 405000 + 4e5 * 1000 / 2e9));
  const auto other = path_coefficients(4e5, 1e6, 7e4, 3, 1, sem, cp);
  CHECK(other.mu_loc == p.mu_loc);

  const auto idle = path_coefficients(0.0, 405000, 405000, 3, 1, sem, cp);
  CHECK(idle.mu_loc == 0.0);
  CHECK(idle.mu_rsu == 0.0);
  CHECK(idle.mu_sv == 0.0);
}

TEST_CASE("total delay of a split") {
  PathCoefficients p{0.2, 0.3, 0.6};
  CHECK(total_delay({1, 0, 0, 0, true}, p) == doctest::Approx(0.2));
  CHECK(total_delay({0.5, 1.0 / 3, 1.0 / 6, 0, true}, {2, 3, 6}) == doctest::Approx(1.0));

  // Convexity along random segments.
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0, 1);
  auto simplex = [&] {
    double a = u(rng), b = u(rng), c = u(rng);
    const double s = a + b + c;
    return OffloadSplit{a / s, b / s, c / s, 0, true};
  };
  for (int i = 0; i < 500; ++i) {
    const auto x = simplex(), y = simplex();
    const double t = u(rng);
    const OffloadSplit z{t * x.rho_loc + (1 - t) * y.rho_loc, t * x.rho_rsu + (1 - t) * y.rho_rsu,
                         t * x.rho_sv + (1 - t) * y.rho_sv, 0, true};
    CHECK(total_delay(z, p) <= t * total_delay(x, p) + (1 - t) * total_delay(y, p) + 1e-12);
  }
}
