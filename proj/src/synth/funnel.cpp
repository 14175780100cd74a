#include "ctrans/errors.hpp"
#include "ctrans/integrate.hpp"
#include "ctrans/parallel.hpp"
#include "ctrans/synth.hpp"
#include "ctrans/text.hpp"

#include <algorithm>
#include <cmath>

namespace ctrans {

FunnelControl funnel_field(const TimeField& v, const Region& omega1, const EtaResult& eta, double k,
                           double taper) {
  if (!(k > 0.0)) throw InputError("funnel_field: k must be positive");
  if (taper < 0.0) throw InputError("funnel_field: negative taper");
  const int d = v.dim();
  auto chi = [omega1, taper](std::span<const double> x) {
    const double sd = omega1.signed_distance(x);
    if (sd < 0.0) return 1.0;
    if (taper <= 0.0) return 0.0;
    return 1.0 - smoothstep(sd / taper);
  };
  const ScalarField eta_f = eta.eta;

  FieldMeta tm;
  const double inner_sup = k * eta.kappa1;
  tm.lipschitz = k * eta.hessian_bound + v.lipschitz();
  if (taper > 0.0) tm.lipschitz += kSmoothstepSlope / taper * (inner_sup + v.sup_bound());
  tm.sup_bound = std::max(inner_sup, v.sup_bound()) + (taper > 0.0 ? v.sup_bound() : 0.0);
  tm.non_lipschitz = taper <= 0.0;
  tm.autonomous = v.meta().autonomous;
  tm.descriptor = {{"kind", "funnel"}, {"k", k}, {"taper", taper}, {"omega1", omega1.to_json()},
                   {"peak", eta.peak}, {"v", v.descriptor()}};

  FunnelControl out;
  out.k = k;
  // Writes the control part into o; returns chi.
  auto control_at = [v, chi, eta_f, k](std::span<const double> x, double t, std::span<double> o) {
    const double c = chi(x);
    if (c == 0.0) {
      std::fill(o.begin(), o.end(), 0.0);
      return c;
    }
    double g[8], w[8];
    const std::size_t n = o.size();
    eta_f.gradient(x, std::span<double>(g, n));
    v.evaluate(x, t, std::span<double>(w, n));
    for (std::size_t i = 0; i < n; ++i) o[i] = c * (k * g[i] - w[i]);
    return c;
  };
  out.total = TimeField(d, [v, control_at](std::span<const double> x, double t, std::span<double> o) {
    double u[8];
    control_at(x, t, std::span<double>(u, o.size()));
    v.evaluate(x, t, o);
    for (std::size_t i = 0; i < o.size(); ++i) o[i] += u[i];
  }, tm);
  FieldMeta cm = tm;
  cm.support = taper > 0.0 ? omega1.inflate(taper) : omega1;
  cm.descriptor["part"] = "control";
  out.control = TimeField(d, [control_at](std::span<const double> x, double t, std::span<double> o) {
    control_at(x, t, o);
  }, cm);
  return out;
}

FunnelResult funnel_control(const TimeField& v, const Region& omega1, const Region& s0, double delta,
                            const ParticleMeasure& mu, const FunnelOptions& opts) {
  if (!(delta > 0.0)) throw InputError("funnel_control: delta must be positive");
  if (mu.is_empty()) throw InputError("funnel_control: empty measure");
  if (v.dim() > 8) throw InputError("funnel_control: dimension above 8 is not supported");
  for (std::size_t i = 0; i < mu.size(); ++i)
    if (!omega1.contains(mu.position(i)))
      throw InputError("funnel_control: particle " + std::to_string(i) + " lies outside omega1");

  FunnelResult res;
  res.eta = weight_eta(omega1, s0);

  // Inside omega1 the speed is at most k * kappa1, so k below
  // dist / (kappa1 * delta) cannot bring the farthest particle into s0.
  double far = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) far = std::max(far, s0.signed_distance(mu.position(i)));
  double k = 1.0;
  const double needed = far / (1.1 * res.eta.kappa1 * delta);
  while (2.0 * k <= needed && 2.0 * k <= opts.k_cap) k *= 2.0;

  const int d = mu.dim();
  for (;; k *= 2.0, ++res.escalations) {
    if (k > opts.k_cap) {
      std::size_t stranded = 0;
      std::string first;
      for (std::size_t i = 0; i < res.hit_times.size(); ++i)
        if (!(res.hit_times[i] >= 0.0 && res.hit_times[i] < delta)) {
          if (stranded++ == 0) {
            for (int a = 0; a < d; ++a) first += (a ? ", " : "") + format_double(mu.coord(i, a));
          }
        }
      throw NumericalError("funnel_control: k exceeded " + format_double(opts.k_cap) + " with " +
                           std::to_string(stranded) + " stranded particles, first at (" + first +
                           "); s0 may not be compactly inside omega1");
    }
    res.field = funnel_field(v, omega1, res.eta, k, opts.taper);
    res.hit_times.assign(mu.size(), -1.0);
    std::vector<char> inside(mu.size(), 1);
    parallel_for(mu.size(), [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) {
        const auto sp = stopped_flow(res.field.total, s0, mu.position(i), 0.0, delta, opts.tol);
        if (sp.hit_time) res.hit_times[i] = *sp.hit_time;
        if (opts.inside_at_end && sp.hit_time) {
          const auto end = integrate_flow(res.field.total, mu.position(i), 0.0, delta, opts.tol);
          inside[i] = s0.contains(end) ? 1 : 0;
        }
      }
    });
    bool ok = true;
    for (std::size_t i = 0; i < mu.size() && ok; ++i)
      ok = res.hit_times[i] >= 0.0 && res.hit_times[i] < delta && inside[i];
    if (ok) {
      res.k_used = k;
      return res;
    }
  }
}

}  // namespace ctrans
