#include "helpers.hpp"

#include "ctrans/kernels.hpp"
#include "ctrans/ot.hpp"

#include <doctest.h>

#include <bit>
#include <cstring>

using namespace ctrans;

namespace {

bool same_bits(double a, double b) { return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b); }

std::vector<double> random_vec(Rng& rng, std::size_t n, double lo, double hi) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(lo, hi);
  return v;
}

std::vector<double> random_mask(Rng& rng, std::size_t n) {
  std::vector<double> m(n);
  for (double& x : m) x = rng.uniform() < 0.3 ? 1.0 : 0.0;
  return m;
}

}  // namespace

TEST_CASE("avx2 kernels are bit-identical to the scalar reference") {
  const kernels::KernelTable* avx = kernels::avx2_table();
  if (!avx) {
    MESSAGE("AVX2 unavailable; equivalence not exercised");
    return;
  }
  const kernels::KernelTable& ref = kernels::scalar_table();
  Rng rng(42);
  // Lengths around the vector width and its remainders.
  for (std::size_t m : {1u, 3u, 4u, 5u, 7u, 8u, 13u, 64u, 257u}) {
    for (int dim : {1, 2, 3}) {
      for (int p : {1, 2}) {
        const auto point = random_vec(rng, dim, -2, 2);
        const auto targets = random_vec(rng, m * dim, -2, 2);
        std::vector<double> a(m), b(m);
        ref.cost_row(point.data(), targets.data(), m, dim, p, a.data());
        avx->cost_row(point.data(), targets.data(), m, dim, p, b.data());
        for (std::size_t j = 0; j < m; ++j) CHECK(same_bits(a[j], b[j]));
      }
    }
    const auto row = random_vec(rng, m, 0, 5), col = random_vec(rng, m, -1, 1);
    const auto mask = random_mask(rng, m);
    auto best_a = random_vec(rng, m, 0, 6);
    auto best_b = best_a;
    std::vector<std::int64_t> from_a(m, -1), from_b(m, -1);
    const auto ra = ref.relax_row(row.data(), 0.3, col.data(), mask.data(), best_a.data(), from_a.data(), 7, m);
    const auto rb = avx->relax_row(row.data(), 0.3, col.data(), mask.data(), best_b.data(), from_b.data(), 7, m);
    CHECK(same_bits(ra.value, rb.value));
    CHECK(ra.index == rb.index);
    for (std::size_t j = 0; j < m; ++j) {
      CHECK(same_bits(best_a[j], best_b[j]));
      CHECK(from_a[j] == from_b[j]);
    }

    const auto vals = random_vec(rng, m, -3, 3);
    const auto sa = ref.argmin_masked(vals.data(), mask.data(), m);
    const auto sb = avx->argmin_masked(vals.data(), mask.data(), m);
    CHECK(same_bits(sa.value, sb.value));
    CHECK(sa.index == sb.index);

    auto va = vals, vb = vals;
    ref.shift_masked(va.data(), mask.data(), 1.0, 0.125, m);
    avx->shift_masked(vb.data(), mask.data(), 1.0, 0.125, m);
    for (std::size_t j = 0; j < m; ++j) CHECK(same_bits(va[j], vb[j]));

    const auto w = random_vec(rng, m, 0, 1), f = random_vec(rng, m, -10, 10);
    CHECK(same_bits(ref.weighted_sum(w.data(), f.data(), m), avx->weighted_sum(w.data(), f.data(), m)));
  }
}

TEST_CASE("argmin ties resolve to the first index") {
  const kernels::KernelTable& ref = kernels::scalar_table();
  const std::vector<double> v{3.0, 1.0, 1.0, 1.0, 2.0, 1.0, 5.0, 1.0, 1.0};
  const std::vector<double> mask(v.size(), 0.0);
  CHECK(ref.argmin_masked(v.data(), mask.data(), v.size()).index == 1);
  if (const auto* avx = kernels::avx2_table()) CHECK(avx->argmin_masked(v.data(), mask.data(), v.size()).index == 1);
  const std::vector<double> all(v.size(), 1.0);
  CHECK(ref.argmin_masked(v.data(), all.data(), v.size()).index == -1);
}

TEST_CASE("transport solutions agree across kernel tables") {
  const kernels::KernelTable* avx = kernels::avx2_table();
  if (!avx) return;
  Rng rng(5);
  for (int rep = 0; rep < 10; ++rep) {
    const auto mu = testing::random_cloud(rng, 2, 60);
    const auto nu = testing::random_cloud(rng, 2, 60);
    SolverOptions a, b;
    a.kernels = &kernels::scalar_table();
    b.kernels = avx;
    const auto ra = wp_discrete(mu, nu, 2, a);
    const auto rb = wp_discrete(mu, nu, 2, b);
    CHECK(same_bits(ra.distance, rb.distance));
    REQUIRE(ra.plan.entries.size() == rb.plan.entries.size());
    for (std::size_t e = 0; e < ra.plan.entries.size(); ++e) CHECK(ra.plan.entries[e].target == rb.plan.entries[e].target);
  }
}
