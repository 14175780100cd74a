// The oracles are checked against hand-derived values and against each other,
// never against the library code they later judge.

#include "ctrans/oracle.hpp"

#include <doctest.h>

#include <cmath>

using namespace ctrans;

TEST_CASE("brute force W_p on tiny instances") {
  const ParticleMeasure a = ParticleMeasure::uniform_weights(1, {0.0, 1.0});
  const ParticleMeasure b = ParticleMeasure::uniform_weights(1, {1.0, 0.0});
  CHECK(oracle::brute_force_wp(a, b, 1) == 0.0);
  const ParticleMeasure c = ParticleMeasure::uniform_weights(1, {2.0, 3.0});
  CHECK(oracle::brute_force_wp(a, c, 1) == doctest::Approx(2.0));
  CHECK(oracle::brute_force_wp(a, c, 2) == doctest::Approx(2.0));
  // Crossing is never optimal in 1D: (0->2, 1->3) beats (0->3, 1->2) for p = 2.
  const ParticleMeasure d = ParticleMeasure::uniform_weights(2, {0.0, 0.0, 3.0, 4.0});
  const ParticleMeasure e = ParticleMeasure::uniform_weights(2, {3.0, 4.0, 0.0, 0.0});
  CHECK(oracle::brute_force_wp(d, e, 2) == 0.0);
}

TEST_CASE("square-root flow quantiles against the closed-form density") {
  // Density of the transported law: 1/2 on (-1, 0) and (1 - t / (2 sqrt x)) / 2
  // on (t^2/4, (t/2 + 1)^2). Integrate it numerically up to the oracle quantile.
  const double t = 1.0;
  for (double q : {0.55, 0.6, 0.75, 0.9, 0.99}) {
    const double x = oracle::sqrt_field_solution(t, q);
    const double lo = t * t / 4.0;
    // The antiderivative of 1 - t/(2 sqrt x) is x - t sqrt x.
    const double mass = 0.5 + 0.5 * ((x - t * std::sqrt(x)) - (lo - t * std::sqrt(lo)));
    CHECK(mass == doctest::Approx(q).epsilon(1e-12));
  }
  CHECK(oracle::sqrt_field_solution(t, 0.25) == doctest::Approx(-0.5));
  CHECK(oracle::sqrt_field_solution(t, 1.0 - 1e-12) == doctest::Approx(2.25).epsilon(1e-9));
  CHECK_THROWS(oracle::sqrt_field_solution(t, 1.0));
  CHECK(oracle::sqrt_field_solution(0.0, 0.8) == doctest::Approx(0.6));
}

TEST_CASE("two-bump W1 from quantiles") {
  // The left half stays put, the right half moves by one: W1 = 1/2.
  CHECK(oracle::two_bump_quantile_w1() == doctest::Approx(0.5).epsilon(1e-12));
}
