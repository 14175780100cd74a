#include "helpers.hpp"

#include "ctrans/errors.hpp"
#include "ctrans/geometry.hpp"

#include <doctest.h>

#include <cmath>

using namespace ctrans;

TEST_CASE("smoothstep shape") {
  CHECK(smoothstep(-1.0) == 0.0);
  CHECK(smoothstep(0.0) == 0.0);
  CHECK(smoothstep(1.0) == 1.0);
  CHECK(smoothstep(2.0) == 1.0);
  CHECK(smoothstep(0.5) == doctest::Approx(0.5));
  CHECK(smoothstep_derivative(0.5) == doctest::Approx(kSmoothstepSlope));
  double prev = 0.0;
  for (int k = 1; k <= 1000; ++k) {
    const double s = k / 1000.0;
    CHECK(smoothstep(s) >= prev);
    CHECK(smoothstep_derivative(s) <= kSmoothstepSlope + 1e-12);
    // Derivative agrees with a central difference.
    if (k < 1000) CHECK(smoothstep_derivative(s) == doctest::Approx((smoothstep(s + 1e-6) - smoothstep(s - 1e-6)) / 2e-6).epsilon(1e-6));
    prev = smoothstep(s);
  }
}

TEST_CASE("cutoff theta vanishes deep inside and equals one outside") {
  const Region r(Box{{0.0, 0.0}, {2.0, 2.0}});
  const double k = 4.0;
  const ScalarField theta = cutoff_theta(r, k);
  const std::vector<double> deep{1.0, 1.0}, shallow{0.1, 1.0}, out{3.0, 1.0}, at_depth{0.25, 1.0};
  CHECK(theta.value(deep) == 0.0);
  CHECK(theta.value(at_depth) == 0.0);
  CHECK(theta.value(out) == 1.0);
  CHECK(theta.value(shallow) > 0.0);
  CHECK(theta.value(shallow) < 1.0);
  CHECK_THROWS_AS(cutoff_theta(r, 0.5), InputError);
}

TEST_CASE("region depth gradient points inward") {
  const Region r(Box{{0.0, 0.0}, {2.0, 1.0}});
  std::vector<double> g(2);
  const std::vector<double> x{1.0, 0.2};
  CHECK(region_depth(r, x, g) == doctest::Approx(0.2));
  CHECK(g[0] == doctest::Approx(0.0));
  CHECK(g[1] == doctest::Approx(1.0));
}

TEST_CASE("funnel weight has a single interior critical point") {
  for (const Region& omega1 : {Region(Box{{0.0, 0.0}, {2.0, 1.0}}), Region(Ball{{0.0, 0.0}, 1.0})}) {
    const Box bb = omega1.bounding_box();
    const std::vector<double> c{0.5 * (bb.lo[0] + bb.hi[0]), 0.5 * (bb.lo[1] + bb.hi[1])};
    const Region s0(Ball{c, 0.2});
    const EtaResult e = weight_eta(omega1, s0);
    CHECK(e.kappa0 > 0.0);
    CHECK(e.kappa1 >= e.kappa0);
    REQUIRE(e.peak.size() == 2);
    CHECK(s0.contains(e.peak));
    std::vector<double> g(2);
    e.eta.gradient(e.peak, g);
    CHECK(std::hypot(g[0], g[1]) <= 1e-8);
    // Vanishes on the boundary, positive inside.
    const std::vector<double> edge{bb.hi[0], c[1]};
    CHECK(std::abs(e.eta.value(edge)) <= 1e-12);
    CHECK(e.eta.value(c) > 0.0);
  }
}

TEST_CASE("geometric condition times and failures") {
  const TimeField v = constant_field({1.0, 0.0});
  const Region omega(Box{{4.0, -1.0}, {6.0, 1.0}});
  const ParticleMeasure mu0(2, {0.0, 0.0, 1.0, 0.5}, {0.5, 0.5});
  const ParticleMeasure mu1(2, {9.0, 0.0, 8.0, -0.5}, {0.5, 0.5});
  const GeometricCheck c = check_geometric_condition(v, mu0, mu1, omega, 20.0, 1e-8, 0.1);
  // Entry into omega shrunk by the margin.
  CHECK(c.t0_star == doctest::Approx(4.1).epsilon(1e-6));
  CHECK(c.t1_star == doctest::Approx(3.1).epsilon(1e-6));

  const ParticleMeasure lost(2, {0.0, 5.0}, {1.0});
  try {
    check_geometric_condition(v, lost, ParticleMeasure(2, {9.0, 0.0}, {1.0}), omega, 20.0, 1e-8, 0.1);
    FAIL("expected a geometric condition failure");
  } catch (const GeometricConditionError& e) {
    CHECK(e.forward());
    CHECK(e.index() == 0);
    CHECK(e.point() == std::vector<double>{0.0, 5.0});
  }
}

TEST_CASE("place_cube avoids the obstacle") {
  const Region outer(Box{{0.0, 0.0}, {4.0, 2.0}});
  const Region obstacle(Box{{0.0, 0.0}, {2.0, 2.0}});
  const auto cube = place_cube(outer, obstacle);
  REQUIRE(cube.has_value());
  CHECK(outer.contains_box(*cube));
  CHECK_FALSE(obstacle.intersects_box(*cube));
}
