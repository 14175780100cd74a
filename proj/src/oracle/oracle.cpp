#include "ctrans/oracle.hpp"

#include "ctrans/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

namespace ctrans::oracle {

double brute_force_wp(const ParticleMeasure& mu, const ParticleMeasure& nu, int p) {
  const std::size_t n = mu.size();
  if (n == 0 || n != nu.size()) throw InputError("brute_force_wp: need the same positive atom count");
  if (n > 8) throw InputError("brute_force_wp: at most 8 atoms");
  if (mu.dim() != nu.dim()) throw InputError("brute_force_wp: dimension mismatch");
  if (p < 1) throw InputError("brute_force_wp: p must be at least 1");
  const double w = mu.weight(0);
  for (std::size_t i = 0; i < n; ++i)
    if (mu.weight(i) != w || nu.weight(i) != w) throw InputError("brute_force_wp: weights must all be equal");

  std::vector<double> cost(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (int a = 0; a < mu.dim(); ++a) s += (mu.coord(i, a) - nu.coord(j, a)) * (mu.coord(i, a) - nu.coord(j, a));
      cost[i * n + j] = std::pow(std::sqrt(s), p);
    }
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = INFINITY;
  do {
    double c = 0.0;
    for (std::size_t i = 0; i < n; ++i) c += cost[i * n + perm[i]];
    best = std::min(best, c);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return std::pow(w * best, 1.0 / p);
}

double sqrt_field_solution(double t, double q) {
  if (!(q > 0.0 && q < 1.0)) throw InputError("sqrt_field_solution: q must lie in (0, 1)");
  if (!(t >= 0.0)) throw InputError("sqrt_field_solution: t must be nonnegative");
  const double x0 = 2.0 * q - 1.0;
  if (x0 <= 0.0) return x0;
  const double r = std::sqrt(x0) + 0.5 * t;
  return r * r;
}

double two_bump_quantile_w1() {
  // Both quantile functions are linear between the breakpoints 0, 1/2, 1, so
  // their difference has constant sign on each piece and the midpoint rule
  // is exact there.
  auto f0 = [](double q) { return q < 0.5 ? -1.0 + 2.0 * q : 1.0 + 2.0 * (q - 0.5); };
  auto f1 = [](double q) { return -1.0 + 2.0 * q; };
  const double cuts[] = {0.0, 0.5, 1.0};
  double total = 0.0;
  for (int k = 0; k < 2; ++k) {
    const double a = cuts[k], b = cuts[k + 1], m = 0.5 * (a + b);
    total += (b - a) * std::abs(f0(m) - f1(m));
  }
  return total;
}

}  // namespace ctrans::oracle
