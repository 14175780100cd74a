#include "layout.hpp"

#include "ctrans/errors.hpp"
#include "ctrans/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ctrans::detail {

Layout make_layout(const Region& omega, double margin) {
  if (!omega.is_convex()) throw InputError("controller: omega must be a single box or ball");
  Layout g;
  g.margin = margin;
  g.storage = omega.shrink(0.5 * margin);
  g.omega1 = omega.shrink(0.25 * margin);
  g.taper = 0.25 * margin;
  if (g.storage.empty()) throw InputError("controller: margin leaves no room inside omega");
  const int d = omega.dim();
  const auto& part = g.storage.parts().front();
  std::vector<double> c(d);
  if (const auto* b = std::get_if<Box>(&part)) {
    g.side = INFINITY;
    for (int a = 0; a < d; ++a) {
      g.side = std::min(g.side, b->hi[a] - b->lo[a]);
      c[a] = 0.5 * (b->lo[a] + b->hi[a]);
    }
  } else {
    const auto& ball = std::get<Ball>(part);
    g.side = 2.0 * ball.radius / std::sqrt(static_cast<double>(d));
    c = ball.center;
  }
  // Strictly inside the storage region.
  g.side *= 0.999;
  g.s = Box{c, c};
  g.unit = Box{c, c};
  for (int a = 0; a < d; ++a) {
    g.s.lo[a] -= 0.5 * g.side;
    g.s.hi[a] += 0.5 * g.side;
    g.unit.lo[a] -= 0.3 * g.side;
    g.unit.hi[a] += 0.3 * g.side;
  }
  g.s0 = Region(Ball{c, 0.25 * g.side});
  return g;
}

nlohmann::json layout_json(const Layout& g) {
  return {{"margin", g.margin},
          {"storage_region", g.storage.to_json()},
          {"omega1", g.omega1.to_json()},
          {"taper", g.taper},
          {"s", Region(g.s).to_json()},
          {"s0", g.s0.to_json()},
          {"unit_box", Region(g.unit).to_json()}};
}

double first_k(const Region& r) {
  const double in = r.inradius();
  double k = 1.0;
  while (!(1.0 / k < in)) k *= 2.0;
  return k;
}

std::vector<std::size_t> outside(const ParticleMeasure& mu, const Region& r) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < mu.size(); ++i)
    if (!r.contains(mu.position(i))) out.push_back(i);
  return out;
}

ParticleMeasure tag_untouched(const ParticleMeasure& mu, std::vector<std::size_t> forced, std::size_t count,
                              std::uint64_t seed) {
  std::vector<int> tags(mu.size(), 0);
  for (std::size_t i : forced) tags[i] = 1;
  std::vector<std::size_t> rest;
  for (std::size_t i = 0; i < mu.size(); ++i)
    if (!tags[i]) rest.push_back(i);
  Rng rng(seed);
  std::size_t need = count > forced.size() ? count - forced.size() : 0;
  need = std::min(need, rest.size());
  for (std::size_t k = 0; k < need; ++k) {
    const std::size_t j = k + rng.index(rest.size() - k);
    std::swap(rest[k], rest[j]);
    tags[rest[k]] = 1;
  }
  return mu.with_tags(std::move(tags));
}

Segment storage_segment(const TimeField& v, const Region& region, double k, double floor, int sign,
                        double t0, double t1) {
  const StorageControl st = storage_control(sign > 0 ? v : scale(v, -1.0), region, k, floor);
  Segment s;
  s.label = "storage";
  s.t_start = t0;
  s.t_end = t1;
  s.total = sign > 0 ? st.total : scale(st.total, -1.0);
  s.control = sign > 0 ? st.control : scale(st.control, -1.0);
  s.descriptor = {{"kind", "storage"}, {"k", k}, {"floor", floor}, {"sign", sign}, {"region", region.to_json()}};
  return s;
}

Segment funnel_segment(const TimeField& v, const Region& omega1, const Region& s0, double k, double taper,
                       int sign, double t0, double t1) {
  const TimeField drift = sign > 0 ? v : scale(v, -1.0);
  const FunnelControl f = funnel_field(drift, omega1, weight_eta(omega1, s0), k, taper);
  Segment s;
  s.label = "funnel";
  s.t_start = t0;
  s.t_end = t1;
  s.total = sign > 0 ? f.total : scale(f.total, -1.0);
  s.control = sign > 0 ? f.control : scale(f.control, -1.0);
  s.descriptor = {{"kind", "funnel"}, {"k", k},           {"taper", taper},
                  {"sign", sign},     {"omega1", omega1.to_json()}, {"s0", s0.to_json()}};
  return s;
}

Segment grid_segment(const TimeField& v, const GridControl& grid, const Box& s, const Box& unit, double t0) {
  const int d = v.dim();
  const double scale_len = unit.hi[0] - unit.lo[0];
  const double width = 0.2 * (s.hi[0] - s.lo[0]);
  auto chi = [s, width, d](std::span<const double> x) {
    double c = 1.0;
    for (int a = 0; a < d && c > 0.0; ++a) c *= smoothstep(std::min(x[a] - s.lo[a], s.hi[a] - x[a]) / width);
    return c;
  };
  auto g = std::make_shared<const GridControl>(grid);
  // Writes chi (g_phys - v) into o.
  auto control_at = [v, g, chi, unit, scale_len, t0, d](std::span<const double> x, double t, std::span<double> o) {
    const double c = chi(x);
    if (c == 0.0) {
      std::fill(o.begin(), o.end(), 0.0);
      return;
    }
    double y[8], gv[8], w[8];
    for (int a = 0; a < d; ++a) y[a] = (x[a] - unit.lo[a]) / scale_len;
    g->velocity(std::span<const double>(y, d), t - t0, std::span<double>(gv, d));
    v.evaluate(x, t, std::span<double>(w, d));
    for (int a = 0; a < d; ++a) o[a] = c * (scale_len * gv[a] - w[a]);
  };
  FieldMeta m;
  m.lipschitz = v.lipschitz() + grid.lipschitz() +
                kSmoothstepSlope * std::sqrt(static_cast<double>(d)) / width * (scale_len * grid.sup_bound() + v.sup_bound());
  m.sup_bound = scale_len * grid.sup_bound() + 2.0 * v.sup_bound();
  m.autonomous = false;
  m.t_begin = t0;
  m.t_end = t0 + grid.horizon();
  m.descriptor = {{"kind", "grid"}, {"t0", t0}, {"s", Region(s).to_json()}, {"unit", Region(unit).to_json()},
                  {"grid", grid.to_json()}};
  Segment seg;
  seg.label = "grid";
  seg.t_start = t0;
  seg.t_end = t0 + grid.horizon();
  seg.total = TimeField(d, [v, control_at](std::span<const double> x, double t, std::span<double> o) {
    double u[8];
    control_at(x, t, std::span<double>(u, o.size()));
    v.evaluate(x, t, o);
    for (std::size_t a = 0; a < o.size(); ++a) o[a] += u[a];
  }, m);
  FieldMeta cm = m;
  cm.support = Region(s);
  seg.control = TimeField(d, control_at, cm);
  seg.descriptor = m.descriptor;
  return seg;
}

std::vector<double> times_between(double t0, double t1, std::size_t intervals) {
  std::vector<double> t(intervals + 1);
  for (std::size_t k = 0; k <= intervals; ++k)
    t[k] = k == intervals ? t1 : t0 + (t1 - t0) * static_cast<double>(k) / static_cast<double>(intervals);
  return t;
}

}  // namespace ctrans::detail
