#include "helpers.hpp"

#include "ctrans/errors.hpp"
#include "ctrans/ot.hpp"

#include <doctest.h>

#include <cmath>

using namespace ctrans;

TEST_CASE("single atoms are at their euclidean distance") {
  const ParticleMeasure a(2, {0.0, 0.0}, {1.0}), b(2, {3.0, 4.0}, {1.0});
  CHECK(wp_discrete(a, b, 1).distance == doctest::Approx(5.0));
  CHECK(wp_discrete(a, b, 2).distance == doctest::Approx(5.0));
}

TEST_CASE("unequal weights use the transport solver") {
  // Half of the mass at 0 must travel to 1.
  const ParticleMeasure a(1, {0.0}, {1.0}), b(1, {0.0, 1.0}, {0.5, 0.5});
  const auto r = wp_discrete(a, b, 1);
  CHECK(r.distance == doctest::Approx(0.5));
  CHECK(r.plan.marginal_residual() <= 1e-12);
  CHECK(wp_discrete(a, b, 2).distance == doctest::Approx(std::sqrt(0.5)));
}

TEST_CASE("wasserstein metric properties on random clouds") {
  Rng rng(21);
  for (int rep = 0; rep < 20; ++rep) {
    const int d = 1 + rep % 2;
    const std::size_t n = 5 + rng.index(20);
    const auto mu = testing::random_cloud(rng, d, n), nu = testing::random_cloud(rng, d, n),
               rho = testing::random_cloud(rng, d, n);
    for (int p : {1, 2}) {
      const double ab = wp_discrete(mu, nu, p).distance, ba = wp_discrete(nu, mu, p).distance;
      CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
      CHECK(wp_discrete(mu, mu, p).distance <= 1e-12);
      CHECK(ab <= wp_discrete(mu, rho, p).distance + wp_discrete(rho, nu, p).distance + 1e-12);
    }
    CHECK(wp_discrete(mu, nu, 1).distance <= wp_discrete(mu, nu, 2).distance + 1e-12);
    const auto eta = testing::random_cloud(rng, d, n);
    CHECK(wasserstein_inequality_suite(mu, nu, rho, eta).all_hold());
  }
}

TEST_CASE("dual certificates are tight") {
  Rng rng(2);
  const auto mu = testing::random_cloud(rng, 2, 40);
  std::vector<double> w(30);
  double s = 0.0;
  for (double& x : w) s += (x = rng.uniform(0.1, 1.0));
  for (double& x : w) x /= s;
  std::vector<double> pos(60);
  for (double& x : pos) x = rng.uniform();
  const ParticleMeasure nu(2, pos, w);
  const auto r = wp_discrete(mu, nu, 1);
  CHECK(r.info.method == "transport");
  CHECK(r.info.dual_residual <= 1e-9);
  CHECK(r.info.marginal_residual <= 1e-12);
  CHECK(r.plan.cost() == doctest::Approx(r.distance).epsilon(1e-12));
}

TEST_CASE("w1_1d agrees with the discrete solver") {
  Rng rng(8);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = 1 + rng.index(40), m = 1 + rng.index(40);
    const auto a = testing::random_cloud(rng, 1, n, -2, 2), b = testing::random_cloud(rng, 1, m, -1, 3);
    CHECK(w1_1d(a, b) == doctest::Approx(wp_discrete(a, b, 1).distance).epsilon(1e-9));
  }
}

TEST_CASE("solver preconditions") {
  const ParticleMeasure a(1, {0.0}, {1.0}), b(1, {0.0}, {2.0});
  CHECK_THROWS_AS(wp_discrete(a, b, 1), InputError);
  CHECK_THROWS_AS(wp_discrete(a, a, 3), InputError);
  SolverOptions small;
  small.max_atoms = 3;
  Rng rng(1);
  const auto big = testing::random_cloud(rng, 1, 4);
  CHECK_THROWS_AS(wp_discrete(big, big, 1, small), InputError);
}

TEST_CASE("displacement interpolation hits both endpoints and moves at constant speed") {
  Rng rng(4);
  const auto mu = testing::random_cloud(rng, 2, 25), nu = testing::random_cloud(rng, 2, 25, 1.0, 2.0);
  const auto r = wp_discrete(mu, nu, 2);
  const double delta = 0.7;
  const auto start = displacement_interpolate(r.plan, 0.0, delta), end = displacement_interpolate(r.plan, delta, delta);
  CHECK(wp_discrete(start, mu, 2).distance <= 1e-12);
  CHECK(wp_discrete(end, nu, 2).distance <= 1e-12);
  for (double t : {0.1, 0.35, 0.6}) {
    const auto mid = displacement_interpolate(r.plan, t, delta);
    CHECK(wp_discrete(mu, mid, 2).distance == doctest::Approx(t / delta * r.distance).epsilon(1e-9));
  }
}

TEST_CASE("subsampling keeps mass and is seeded") {
  Rng rng(6);
  const auto mu = testing::random_cloud(rng, 2, 500);
  const auto s = subsample(mu, 100, 3);
  CHECK(s.size() == 100);
  CHECK(s.total_mass() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(s == subsample(mu, 100, 3));
  CHECK(subsample(mu, 1000, 3) == mu);
  CHECK(w1_subsampled(mu, mu, 1000, 1) == 0.0);
}
