#include "ctrans/errors.hpp"
#include "ctrans/synth.hpp"

#include <algorithm>

namespace ctrans {

StorageControl storage_control(const TimeField& v, const Region& omega0, double k, double floor) {
  if (!v.valid()) throw InputError("storage_control: missing field");
  if (!(floor >= 0.0 && floor < 1.0)) throw InputError("storage_control: floor must lie in [0, 1)");
  // Validates 1/k < inradius.
  const ScalarField theta = cutoff_theta(omega0, k);
  const int d = v.dim();
  const double keep = 1.0 - floor;

  auto weight = [omega0, k, keep, d](std::span<const double> x) {
    double g[8];
    const double depth = region_depth(omega0, x, std::span<double>(g, static_cast<std::size_t>(d)));
    return 1.0 - keep * smoothstep(k * depth);
  };

  FieldMeta tm;
  tm.lipschitz = v.lipschitz() + kSmoothstepSlope * k * keep * v.sup_bound();
  tm.sup_bound = v.sup_bound();
  tm.autonomous = v.meta().autonomous;
  tm.t_begin = v.meta().t_begin;
  tm.t_end = v.meta().t_end;
  tm.descriptor = {{"kind", "storage"}, {"k", k}, {"floor", floor}, {"omega0", omega0.to_json()},
                   {"v", v.descriptor()}};
  StorageControl out;
  out.k = k;
  out.floor = floor;
  out.total = TimeField(d, [v, weight](std::span<const double> x, double t, std::span<double> o) {
    const double w = weight(x);
    if (w == 0.0) {
      std::fill(o.begin(), o.end(), 0.0);
      return;
    }
    v.evaluate(x, t, o);
    for (double& c : o) c *= w;
  }, tm);

  FieldMeta cm = tm;
  cm.support = omega0;
  cm.descriptor["part"] = "control";
  out.control = TimeField(d, [v, weight](std::span<const double> x, double t, std::span<double> o) {
    const double w = weight(x) - 1.0;
    if (w == 0.0) {
      std::fill(o.begin(), o.end(), 0.0);
      return;
    }
    v.evaluate(x, t, o);
    for (double& c : o) c *= w;
  }, cm);
  return out;
}

}  // namespace ctrans
