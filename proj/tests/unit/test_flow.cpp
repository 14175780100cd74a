#include "helpers.hpp"

#include "ctrans/errors.hpp"
#include "ctrans/integrate.hpp"
#include "ctrans/parallel.hpp"
#include "ctrans/trajectory.hpp"

#include <doctest.h>

#include <atomic>
#include <cmath>
#include <filesystem>

using namespace ctrans;

TEST_CASE("constant field moves points linearly") {
  const TimeField v = constant_field({1.0, -0.5});
  const std::vector<double> x0{0.0, 0.0};
  const auto x = integrate_flow(v, x0, 0.0, 2.0, 1e-8);
  CHECK(x[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(x[1] == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("linear field matches the exponential") {
  // x' = -x, y' = 2y.
  const TimeField v = affine_field({-1.0, 0.0, 0.0, 2.0}, {0.0, 0.0});
  const std::vector<double> x0{1.0, 0.5};
  const auto x = integrate_flow(v, x0, 0.0, 1.0, 1e-10);
  CHECK(x[0] == doctest::Approx(std::exp(-1.0)).epsilon(1e-9));
  CHECK(x[1] == doctest::Approx(0.5 * std::exp(2.0)).epsilon(1e-9));
}

TEST_CASE("semigroup and reversibility") {
  const TimeField v(2, [](std::span<const double> x, double, std::span<double> o) {
    o[0] = std::sin(x[1]);
    o[1] = 0.5 * std::cos(x[0]);
  }, FieldMeta{1.0, 1.0, false, true, std::nullopt});
  const double tol = 1e-8;
  const std::vector<double> x0{0.3, -0.2};
  const auto direct = integrate_flow(v, x0, 0.0, 2.0, tol);
  const auto half = integrate_flow(v, x0, 0.0, 0.7, tol);
  const auto split = integrate_flow(v, half, 0.7, 2.0, tol);
  CHECK(std::hypot(direct[0] - split[0], direct[1] - split[1]) <= 10 * tol);
  const auto back = integrate_flow(v, direct, 2.0, 0.0, tol);
  CHECK(std::hypot(back[0] - x0[0], back[1] - x0[1]) <= 100 * tol);
  const auto reversed = integrate_flow(time_reversed(v, 2.0), direct, 0.0, 2.0, tol);
  CHECK(std::hypot(reversed[0] - x0[0], reversed[1] - x0[1]) <= 100 * tol);
}

TEST_CASE("step size honours the Lipschitz bound") {
  const TimeField fast = affine_field({-50.0}, {0.0});
  CHECK(rk4_step(fast, 1e-4) <= 0.1 / 50.0 + 1e-15);
  CHECK(rk4_step(constant_field({1.0}), 1e-4) == doctest::Approx(0.1));
}

TEST_CASE("non-finite values are reported") {
  const TimeField blow(1, [](std::span<const double> x, double, std::span<double> o) { o[0] = x[0] * x[0]; },
                       FieldMeta{1.0, 1.0, false, true, std::nullopt});
  const std::vector<double> x0{1.0};
  CHECK_THROWS_AS(integrate_flow(blow, x0, 0.0, 5.0, 1e-4), NumericalError);
}

TEST_CASE("stopped flow on a constant field") {
  const TimeField v = constant_field({1.0, 0.0});
  const Region wall(Box{{1.0, -10.0}, {5.0, 10.0}});
  const std::vector<double> x0{0.0, 0.0};
  const double tol = 1e-8;
  const auto r = stopped_flow(v, wall, x0, 0.0, 3.0, tol);
  REQUIRE(r.hit_time.has_value());
  CHECK(std::abs(*r.hit_time - 1.0) <= tol);
  CHECK(r.endpoint[0] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(r.endpoint[1] == 0.0);
  const Region behind(Box{{-5.0, -1.0}, {-1.0, 1.0}});
  CHECK_FALSE(stopped_flow(v, behind, x0, 0.0, 3.0, tol).hit_time.has_value());
}

TEST_CASE("piecewise fields switch at their boundaries") {
  auto a = std::make_shared<const TimeField>(constant_field({1.0}));
  auto b = std::make_shared<const TimeField>(constant_field({-2.0}));
  const TimeField pw = TimeField::piecewise(1, {{0.0, 1.0, a}, {1.0, 2.0, b}});
  const std::vector<double> x0{0.0};
  CHECK(integrate_flow(pw, x0, 0.0, 2.0, 1e-8)[0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK_THROWS_AS(TimeField::piecewise(1, {{0.0, 1.0, a}, {1.5, 2.0, b}}), InputError);
}

TEST_CASE("flow push keeps weights and tags") {
  Rng rng(1);
  const auto mu = testing::random_cloud(rng, 2, 40).with_tags(std::vector<int>(40, 1));
  const auto pushed = flow_push(constant_field({0.5, 0.0}), mu, 0.0, 1.0, 1e-6);
  CHECK(pushed.weights() == mu.weights());
  CHECK(pushed.tags() == mu.tags());
  CHECK(pushed.coord(7, 0) == doctest::Approx(mu.coord(7, 0) + 0.5));
}

TEST_CASE("parallel_for covers every index once") {
  std::vector<std::atomic<int>> hits(1003);
  parallel_for(hits.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) hits[i]++;
  });
  for (auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS_AS(parallel_for(10, [](std::size_t, std::size_t) { throw InputError("boom"); }), InputError);
}

TEST_CASE("weak residual shrinks at second order under refinement") {
  const TimeField v(2, [](std::span<const double> x, double t, std::span<double> o) {
    o[0] = 0.3 * std::sin(x[1] + t);
    o[1] = 0.2 * std::cos(x[0]);
  }, FieldMeta{0.5, 0.4, false, false, std::nullopt});
  Rng rng(3);
  const auto mu = testing::random_cloud(rng, 2, 200, 0.2, 0.8);
  const std::vector<TestFunction> tests{bump_test_function({0.5, 0.5}, 0.6)};
  double prev = 0.0;
  for (std::size_t k : {16u, 32u, 64u}) {
    const Trajectory tr = simulate(v, mu, time_grid(0.0, 1.0, k), 1e-10);
    const double r = weak_residual(tr, v, tests)[0];
    if (prev > 0.0) CHECK(std::log2(prev / r) >= 1.8);
    prev = r;
  }
}

TEST_CASE("trajectory files carry provenance") {
  Rng rng(2);
  const auto mu = testing::random_cloud(rng, 1, 10);
  const Trajectory tr = simulate(constant_field({1.0}), mu, time_grid(0.0, 1.0, 2), 1e-6);
  const auto dir = std::filesystem::temp_directory_path() / "ctrans_unit_traj";
  std::filesystem::remove_all(dir);
  write_trajectory(dir, tr, Provenance("feed"));
  const std::string manifest = read_text(dir / "manifest.json");
  CHECK(manifest.find("feed") != std::string::npos);
  const auto snap = measure_from_csv(read_text(dir / "snapshot_0002.csv"));
  CHECK(snap.coord(3, 0) == doctest::Approx(mu.coord(3, 0) + 1.0));
  std::filesystem::remove_all(dir);
}

TEST_CASE("trajectory rejects inconsistent states") {
  Rng rng(2);
  const auto mu = testing::random_cloud(rng, 1, 10);
  Trajectory tr(0.0, mu);
  CHECK_THROWS_AS(tr.append(0.0, mu), InputError);
  CHECK_THROWS_AS(tr.append(1.0, mu.scaled(2.0)), InputError);
}
