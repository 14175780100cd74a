#include "ctrans/errors.hpp"
#include "ctrans/geometry.hpp"
#include "ctrans/integrate.hpp"
#include "ctrans/parallel.hpp"
#include "ctrans/text.hpp"

#include <algorithm>
#include <cmath>

namespace ctrans {

namespace {

HitRecord hits(const TimeField& field, const ParticleMeasure& mu, const Region& omega,
               const Region& stop, double horizon, double tol, bool forward) {
  const int d = mu.dim();
  HitRecord rec;
  rec.times.assign(mu.size(), -1.0);
  rec.points.assign(mu.size() * d, 0.0);
  parallel_for(mu.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const auto x = mu.position(i);
      if (omega.contains(x)) {
        rec.times[i] = 0.0;
        std::copy(x.begin(), x.end(), rec.points.begin() + static_cast<std::ptrdiff_t>(i * d));
        continue;
      }
      const auto sp = stopped_flow(field, stop, x, 0.0, horizon, tol);
      if (sp.hit_time) {
        rec.times[i] = *sp.hit_time;
        std::copy(sp.endpoint.begin(), sp.endpoint.end(),
                  rec.points.begin() + static_cast<std::ptrdiff_t>(i * d));
      }
    }
  });
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (rec.times[i] < 0.0) {
      auto x = mu.position(i);
      std::string where;
      for (int a = 0; a < d; ++a) where += (a ? ", " : "") + format_double(x[a]);
      throw GeometricConditionError(std::string(forward ? "forward" : "backward") + " path of particle " +
                                        std::to_string(i) + " at (" + where + ") never enters omega",
                                    std::vector<double>(x.begin(), x.end()), forward, i);
    }
  }
  return rec;
}

std::optional<Box> hit_box(const HitRecord& rec, int d, double pad, const Box& clip) {
  if (rec.times.empty()) return std::nullopt;
  Box b{std::vector<double>(d, INFINITY), std::vector<double>(d, -INFINITY)};
  for (std::size_t i = 0; i < rec.times.size(); ++i)
    for (int a = 0; a < d; ++a) {
      b.lo[a] = std::min(b.lo[a], rec.points[i * d + a]);
      b.hi[a] = std::max(b.hi[a], rec.points[i * d + a]);
    }
  b = expand(b, pad);
  for (int a = 0; a < d; ++a) {
    b.lo[a] = std::max(b.lo[a], clip.lo[a]);
    b.hi[a] = std::min(b.hi[a], clip.hi[a]);
    if (!(b.lo[a] < b.hi[a])) return std::nullopt;
  }
  return b;
}

}  // namespace

GeometricCheck check_geometric_condition(const TimeField& v, const ParticleMeasure& mu0,
                                         const ParticleMeasure& mu1, const Region& omega,
                                         double horizon, double tol, double margin) {
  if (mu0.is_empty() || mu1.is_empty()) throw InputError("geometric check: empty measure");
  if (omega.empty()) throw InputError("geometric check: empty omega");
  if (!(horizon > 0.0)) throw InputError("geometric check: horizon must be positive");
  if (!(margin > 0.0)) throw InputError("geometric check: margin must be positive");
  if (!v.meta().autonomous) throw InputError("geometric check: v must be autonomous");
  const int d = mu0.dim();

  // Particles already inside omega count as hits at time 0; the margin is
  // reduced so that they still sit inside the shrunk region.
  double m = margin;
  for (const auto* mu : {&mu0, &mu1})
    for (std::size_t i = 0; i < mu->size(); ++i)
      if (omega.contains(mu->position(i))) m = std::min(m, 0.5 * omega.depth(mu->position(i)));
  const Region stop = omega.shrink(m);
  if (stop.empty()) throw InputError("geometric check: margin leaves no interior");

  GeometricCheck res;
  res.margin = m;
  res.resolution = mu0.size() + mu1.size();
  res.forward = hits(v, mu0, omega, stop, horizon, tol, true);
  res.backward = hits(time_reversed(v, 0.0), mu1, omega, stop, horizon, tol, false);
  for (double t : res.forward.times) res.t0_star = std::max(res.t0_star, t);
  for (double t : res.backward.times) res.t1_star = std::max(res.t1_star, t);

  const Region inner = omega.shrink(0.5 * m);
  const Box clip = inner.bounding_box();
  std::vector<Primitive> parts;
  for (const auto* rec : {&res.forward, &res.backward}) {
    auto b = hit_box(*rec, d, 0.25 * m, clip);
    if (!b) continue;
    if (!inner.contains_box(*b)) {
      res.omega0_fallback = true;
      break;
    }
    parts.emplace_back(*b);
  }
  res.omega0 = res.omega0_fallback || parts.empty() ? inner : Region::union_of(std::move(parts));
  return res;
}

std::optional<Box> place_cube(const Region& outer, const Region& obstacle, std::size_t grid) {
  if (outer.empty()) return std::nullopt;
  const Box bb = outer.bounding_box();
  const int d = outer.dim();
  double ext = INFINITY;
  for (int a = 0; a < d; ++a) ext = std::min(ext, bb.hi[a] - bb.lo[a]);
  std::size_t total = 1;
  for (int a = 0; a < d; ++a) total *= grid;
  std::optional<Box> best;
  double best_side = 0.0;
  Box cube{std::vector<double>(d), std::vector<double>(d)};
  auto fits = [&](const std::vector<double>& corner, double side) {
    for (int a = 0; a < d; ++a) {
      cube.lo[a] = corner[a];
      cube.hi[a] = corner[a] + side;
    }
    return outer.contains_box(cube) && (obstacle.empty() || !obstacle.intersects_box(cube));
  };
  std::vector<double> corner(d);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t r = idx;
    for (int a = 0; a < d; ++a) {
      corner[a] = bb.lo[a] + (bb.hi[a] - bb.lo[a]) * static_cast<double>(r % grid) / static_cast<double>(grid);
      r /= grid;
    }
    if (!fits(corner, best_side > 0.0 ? best_side : 1e-9 * ext)) continue;
    double lo = best_side, hi = ext;
    if (fits(corner, hi)) {
      lo = hi;
    } else {
      for (int it = 0; it < 50; ++it) {
        const double mid = 0.5 * (lo + hi);
        (fits(corner, mid) ? lo : hi) = mid;
      }
    }
    if (lo > best_side) {
      best_side = lo;
      Box b{corner, corner};
      for (int a = 0; a < d; ++a) b.hi[a] += lo;
      best = b;
    }
  }
  return best;
}

}  // namespace ctrans
