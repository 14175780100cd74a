#include "ctrans/errors.hpp"
#include "ctrans/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace ctrans {

double smoothstep(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  return s * s * s * (s * (6.0 * s - 15.0) + 10.0);
}

double smoothstep_derivative(double s) {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  const double q = s * (1.0 - s);
  return 30.0 * q * q;
}

double region_depth(const Region& r, std::span<const double> x, std::span<double> grad) {
  std::fill(grad.begin(), grad.end(), 0.0);
  double best = 0.0;
  for (const auto& part : r.parts()) {
    if (const auto* b = std::get_if<Box>(&part)) {
      double depth = INFINITY;
      std::size_t axis = 0;
      double sign = 0.0;
      for (std::size_t i = 0; i < b->lo.size(); ++i) {
        const double lo = x[i] - b->lo[i], hi = b->hi[i] - x[i];
        if (lo < depth) depth = lo, axis = i, sign = 1.0;
        if (hi < depth) depth = hi, axis = i, sign = -1.0;
      }
      if (depth > best) {
        best = depth;
        std::fill(grad.begin(), grad.end(), 0.0);
        grad[axis] = sign;
      }
    } else {
      const auto& s = std::get<Ball>(part);
      double n2 = 0.0;
      for (std::size_t i = 0; i < s.center.size(); ++i) n2 += (x[i] - s.center[i]) * (x[i] - s.center[i]);
      const double n = std::sqrt(n2);
      const double depth = s.radius - n;
      if (depth > best) {
        best = depth;
        for (std::size_t i = 0; i < s.center.size(); ++i) grad[i] = n > 0.0 ? -(x[i] - s.center[i]) / n : 0.0;
      }
    }
  }
  return best;
}

ScalarField cutoff_theta(const Region& omega0, double k) {
  if (omega0.empty()) throw InputError("cutoff_theta: empty region");
  if (!(k > 0.0) || !(1.0 / k < omega0.inradius()))
    throw InputError("cutoff_theta: 1/k must be smaller than the inradius of omega0");
  ScalarField f;
  f.note = "1 - smoothstep(k * depth), Lipschitz with constant 1.875 k";
  const int d = omega0.dim();
  f.value = [omega0, k, d](std::span<const double> x) {
    double g[8];
    std::vector<double> heap;
    std::span<double> gs(g, d);
    if (d > 8) heap.resize(d), gs = heap;
    return 1.0 - smoothstep(k * region_depth(omega0, x, gs));
  };
  f.gradient = [omega0, k](std::span<const double> x, std::span<double> out) {
    const double depth = region_depth(omega0, x, out);
    const double s = -k * smoothstep_derivative(k * depth);
    for (double& v : out) v *= s;
  };
  return f;
}

}  // namespace ctrans
