#include "ctrans/errors.hpp"
#include "ctrans/synth.hpp"

namespace ctrans {

GeodesicResult geodesic_transport(const ParticleMeasure& mu0, const ParticleMeasure& mu1, double delta,
                                  const Region& s, std::size_t snapshots) {
  if (!(delta > 0.0)) throw InputError("geodesic_transport: delta must be positive");
  if (!s.is_convex()) throw InputError("geodesic_transport: region must be convex (a single box or ball)");
  if (snapshots < 2) throw InputError("geodesic_transport: need at least two snapshots");
  for (const auto* mu : {&mu0, &mu1})
    for (std::size_t i = 0; i < mu->size(); ++i)
      if (!s.contains_closure(mu->position(i)))
        throw InputError("geodesic_transport: support leaves the convex region");

  GeodesicResult res;
  const auto w = wp_discrete(mu0, mu1, 2);
  res.plan = w.plan;
  res.w2 = w.distance;
  res.start = displacement_interpolate(res.plan, 0.0, delta);
  res.end = displacement_interpolate(res.plan, delta, delta);
  const int d = mu0.dim();
  res.velocities.resize(res.start.size() * d);
  for (std::size_t i = 0; i < res.start.size(); ++i)
    for (int a = 0; a < d; ++a)
      res.velocities[i * d + a] = (res.end.coord(i, a) - res.start.coord(i, a)) / delta;

  res.trajectory = Trajectory(0.0, res.start);
  for (std::size_t k = 1; k < snapshots; ++k) {
    const double t = k + 1 == snapshots ? delta : delta * static_cast<double>(k) / static_cast<double>(snapshots - 1);
    res.trajectory.append(t, displacement_interpolate(res.plan, t, delta));
  }
  res.trajectory.field_descriptor = {{"kind", "geodesic"}, {"delta", delta}, {"entries", res.plan.entries.size()}};
  return res;
}

}  // namespace ctrans
