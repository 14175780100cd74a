#include "helpers.hpp"

#include "ctrans/density.hpp"
#include "ctrans/errors.hpp"
#include "ctrans/measure.hpp"
#include "ctrans/measure_io.hpp"
#include "ctrans/partition.hpp"
#include "ctrans/region.hpp"

#include <doctest.h>

#include <cmath>

using namespace ctrans;

TEST_CASE("measure constructor rejects bad input") {
  CHECK_THROWS_AS(ParticleMeasure(0, {}, {}), InputError);
  CHECK_THROWS_AS(ParticleMeasure(2, {0.0, 1.0, 2.0}, {1.0}), InputError);
  CHECK_THROWS_AS(ParticleMeasure(1, {0.0}, {-1.0}), InputError);
  CHECK_THROWS_AS(ParticleMeasure(1, {NAN}, {1.0}), InputError);
  CHECK_THROWS_AS(ParticleMeasure(1, {0.0}, {INFINITY}), InputError);
}

TEST_CASE("measure operations keep mass bookkeeping") {
  Rng rng(3);
  const auto a = testing::random_cloud(rng, 2, 50);
  const auto b = testing::random_cloud(rng, 2, 30);
  CHECK(a.total_mass() == doctest::Approx(1.0).epsilon(1e-14));
  const auto c = a.concat(b);
  CHECK(c.size() == 80);
  CHECK(c.total_mass() == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(a.scaled(0.25).total_mass() == doctest::Approx(0.25).epsilon(1e-14));
  const std::vector<std::size_t> idx{1, 4, 9};
  const auto s = a.subset(idx);
  CHECK(s.size() == 3);
  CHECK(s.coord(2, 1) == a.coord(9, 1));
  std::vector<int> tags(50, 0);
  tags[7] = 1;
  tags[8] = 1;
  const auto t = a.with_tags(tags);
  CHECK(t.select_tag(1).size() == 2);
  CHECK(t.select_tag(1, false).size() == 48);
}

TEST_CASE("merge_coincident sums weights of identical atoms") {
  const ParticleMeasure m(1, {0.0, 1.0, 0.0}, {0.25, 0.5, 0.25});
  const auto merged = merge_coincident(m);
  CHECK(merged.size() == 2);
  CHECK(merged.total_mass() == doctest::Approx(1.0));
}

TEST_CASE("region signed distance and containment") {
  const Region box(Box{{0.0, 0.0}, {2.0, 1.0}});
  const std::vector<double> inside{1.0, 0.5}, edge{2.0, 0.5}, outside{3.0, 0.5};
  CHECK(box.signed_distance(inside) == doctest::Approx(-0.5));
  CHECK(box.contains(inside));
  CHECK_FALSE(box.contains(edge));
  CHECK(box.contains_closure(edge));
  CHECK(box.signed_distance(outside) == doctest::Approx(1.0));
  CHECK(box.depth(inside) == doctest::Approx(0.5));
  CHECK(box.depth(outside) == 0.0);
  CHECK(box.inradius() == doctest::Approx(0.5));

  const Region ball(Ball{{0.0, 0.0}, 1.0});
  const std::vector<double> p{3.0, 4.0};
  CHECK(ball.signed_distance(p) == doctest::Approx(4.0));
  CHECK(ball.shrink(0.25).inradius() == doctest::Approx(0.75));
  CHECK(ball.inflate(0.5).signed_distance(p) == doctest::Approx(3.5));
}

TEST_CASE("region json round trip") {
  const Region u = Region::union_of({Box{{0.0, 0.0}, {1.0, 1.0}}, Ball{{3.0, 0.0}, 0.5}});
  const Region back = Region::from_json(u.to_json());
  CHECK(back.to_json() == u.to_json());
  CHECK_FALSE(u.is_convex());
  CHECK_THROWS_AS(Region::from_json(nlohmann::json{{"kind", "torus"}}), InputError);
}

TEST_CASE("signed distance is 1-Lipschitz") {
  const Region u = Region::union_of({Box{{0.0, 0.0}, {1.0, 1.0}}, Ball{{2.0, 0.5}, 0.7}});
  Rng rng(11);
  for (int k = 0; k < 2000; ++k) {
    const std::vector<double> x{rng.uniform(-1, 4), rng.uniform(-1, 2)}, y{rng.uniform(-1, 4), rng.uniform(-1, 2)};
    const double dist = std::hypot(x[0] - y[0], x[1] - y[1]);
    CHECK(std::abs(u.signed_distance(x) - u.signed_distance(y)) <= dist + 1e-12);
  }
}

TEST_CASE("density sampling lands in the support") {
  const auto g = DensitySpec::gaussian({1.0, 2.0}, 0.3, 0.5);
  const auto m = sample(g, 3000, 5);
  CHECK(m.size() == 3000);
  const Region ball(Ball{{1.0, 2.0}, 0.5});
  for (std::size_t i = 0; i < m.size(); ++i) CHECK(ball.contains_closure(m.position(i)));
  CHECK(sample(g, 100, 5) == sample(g, 100, 5));
  CHECK_FALSE(sample(g, 100, 5) == sample(g, 100, 6));
}

TEST_CASE("density validation") {
  CHECK_THROWS_AS(DensitySpec::gaussian({0.0}, 1.0, INFINITY).validate(), InputError);
  CHECK_THROWS_AS(DensitySpec::from_json(nlohmann::json{{"kind", "cauchy"}}), InputError);
  // The profile must stay positive on its box.
  CHECK_THROWS_AS(DensitySpec::profile(Box{{0.0, 0.0}, {1.0, 1.0}}, {5.0, 5.0}).validate(), InputError);
}

TEST_CASE("density json round trip") {
  const auto mix = DensitySpec::mixture(
      {0.5, 0.5}, {DensitySpec::uniform_box(Box{{-1.0}, {0.0}}), DensitySpec::uniform_box(Box{{1.0}, {2.0}})});
  const auto back = DensitySpec::from_json(mix.to_json());
  CHECK(back.to_json() == mix.to_json());
}

TEST_CASE("one-dimensional quantile inverts the cdf") {
  const auto mix = DensitySpec::mixture(
      {0.5, 0.5}, {DensitySpec::uniform_box(Box{{-1.0}, {0.0}}), DensitySpec::uniform_box(Box{{1.0}, {2.0}})});
  for (double q : {0.01, 0.2, 0.49, 0.51, 0.75, 0.99}) CHECK(cdf_1d(mix, quantile_1d(mix, q)) == doctest::Approx(q).epsilon(1e-9));
  CHECK(quantile_1d(mix, 0.25) == doctest::Approx(-0.5));
  CHECK(quantile_1d(mix, 0.75) == doctest::Approx(1.5));
}

TEST_CASE("stratified samples put one point per quantile stratum") {
  const auto u = DensitySpec::uniform_box(Box{{-1.0}, {1.0}});
  const auto m = sample_stratified(u, 100, 2);
  std::vector<double> xs(m.positions());
  std::sort(xs.begin(), xs.end());
  for (std::size_t k = 0; k < xs.size(); ++k) {
    CHECK(xs[k] >= -1.0 + 2.0 * k / 100.0);
    CHECK(xs[k] <= -1.0 + 2.0 * (k + 1) / 100.0);
  }
}

TEST_CASE("quantile partition masses") {
  Rng rng(17);
  const int n = 5;
  const auto mu = testing::random_cloud(rng, 2, 2500);
  const GridPartition g = partition_measure(mu, n);
  REQUIRE(g.outer_x.size() == n + 1);
  for (int i = 0; i < n; ++i) {
    double col = 0.0;
    std::vector<double> cells(n, 0.0);
    for (std::size_t p = 0; p < mu.size(); ++p) {
      const double x = mu.coord(p, 0), y = mu.coord(p, 1);
      const bool in_col = x >= g.outer_x[i] && (x < g.outer_x[i + 1] || (i + 1 == n && x <= g.outer_x[i + 1]));
      if (!in_col) continue;
      col += mu.weight(p);
      for (int j = 0; j < n; ++j)
        if (y >= g.outer_y[i][j] && (y < g.outer_y[i][j + 1] || (j + 1 == n && y <= g.outer_y[i][j + 1])))
          cells[j] += mu.weight(p);
    }
    // Ties at a wall can move one particle across.
    CHECK(std::abs(col - 1.0 / n) <= 1.0 / 2500 + 1e-12);
    for (double c : cells) CHECK(std::abs(c - 1.0 / (n * n)) <= 2.0 / 2500 + 1e-12);
  }
  CHECK_THROWS_AS(partition_measure(mu, 2), InputError);
  CHECK_THROWS_AS(partition_measure(mu.scaled(1.0).with_positions(std::vector<double>(5000, 3.0)), n), InputError);
}

TEST_CASE("grid error bound values") {
  CHECK(grid_error_bound(4) == doctest::Approx(1.625).epsilon(1e-15));
  CHECK(grid_error_bound(16) == doctest::Approx(0.564453125).epsilon(1e-15));
  CHECK(inner_cell_fraction(4, 2) == doctest::Approx(4.0 / 256.0));
  // Decreasing from n = 3 on.
  for (int n = 4; n < 200; ++n) CHECK(grid_error_bound(n) < grid_error_bound(n - 1));
}

TEST_CASE("measure csv round trip and provenance") {
  Rng rng(9);
  const auto m = testing::random_cloud(rng, 2, 20).with_tags(std::vector<int>(20, 1));
  const Provenance prov("abc");
  const std::string csv = measure_to_csv(m, prov);
  CHECK(csv.rfind("# scenario_hash=abc", 0) == 0);
  CHECK(measure_from_csv(csv) == m);
  CHECK(measure_checksum(m) == measure_checksum(measure_from_csv(csv)));
}
