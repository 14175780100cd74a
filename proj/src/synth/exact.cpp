#include "layout.hpp"

#include "ctrans/errors.hpp"
#include "ctrans/integrate.hpp"
#include "ctrans/parallel.hpp"
#include "ctrans/synth.hpp"

#include <algorithm>
#include <cmath>

namespace ctrans {

using namespace detail;

namespace {

// Field equal to `inner` on the closure of r and `outer` elsewhere.
TimeField switch_on(const Region& r, const TimeField& inner, const TimeField& outer, nlohmann::json desc) {
  FieldMeta m;
  m.non_lipschitz = true;
  m.lipschitz = std::max(inner.lipschitz(), outer.lipschitz());
  m.sup_bound = std::max(inner.sup_bound(), outer.sup_bound());
  m.autonomous = inner.meta().autonomous && outer.meta().autonomous;
  m.descriptor = std::move(desc);
  return TimeField(inner.dim(), [r, inner, outer](std::span<const double> x, double t, std::span<double> o) {
    (r.contains_closure(x) ? inner : outer).evaluate(x, t, o);
  }, m);
}

Segment witness_segment(std::string label, double t0, double t1, const TimeField& v, const TimeField& control,
                        nlohmann::json desc) {
  Segment s;
  s.label = std::move(label);
  s.t_start = t0;
  s.t_end = t1;
  s.control = control;
  s.total = add(v, control);
  s.descriptor = std::move(desc);
  s.witness = true;
  return s;
}

// Positions of every particle stopped on entry into r, after `elapsed`.
std::vector<double> stopped_positions(const TimeField& w, const Region& r, const ParticleMeasure& mu, double elapsed,
                                      double tol) {
  const int d = mu.dim();
  std::vector<double> out(mu.size() * d);
  parallel_for(mu.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      std::vector<double> x;
      if (elapsed > 0.0) x = stopped_flow(w, r, mu.position(i), 0.0, elapsed, tol).endpoint;
      else x.assign(mu.position(i).begin(), mu.position(i).end());
      std::copy(x.begin(), x.end(), out.begin() + static_cast<std::ptrdiff_t>(i * d));
    }
  });
  return out;
}

double final_distance(const ParticleMeasure& a, const ParticleMeasure& b) {
  return wp_discrete(a, b, 1).distance;
}

}  // namespace

ControllerResult exact_controller(const ControlProblem& p) {
  if (!p.v.valid()) throw InputError("controller: missing velocity field");
  if (!p.v.meta().autonomous) throw InputError("controller: v must be autonomous");
  if (p.mu0.is_empty() || p.mu1.is_empty()) throw InputError("controller: empty measure");
  if (p.mu0.dim() != p.mu1.dim() || p.mu0.dim() != p.v.dim()) throw InputError("controller: dimension mismatch");
  if (!(p.delta > 0.0)) throw InputError("controller: delta must be positive");
  if (!p.omega.is_convex()) throw InputError("controller: omega must be a single box or ball");
  check_equal_mass(p.mu0, p.mu1, "exact_controller");
  const int d = p.v.dim();
  const std::size_t snaps = std::max<std::size_t>(p.snapshots_per_phase, 1);
  ControllerResult out;
  nlohmann::json& rep = out.report;
  rep["mode"] = "exact";
  rep["delta"] = p.delta;
  const TimeField zero = zero_field(d);

  bool all_in = true;
  for (const auto* mu : {&p.mu0, &p.mu1})
    for (std::size_t i = 0; i < mu->size() && all_in; ++i) all_in = p.omega.contains(mu->position(i));
  if (all_in) {
    // Both supports already sit in the convex control region.
    const GeodesicResult geo = geodesic_transport(p.mu0, p.mu1, p.delta, p.omega, snaps + 1);
    const TimeField cancel = switch_on(p.omega, scale(p.v, -1.0), zero, {{"kind", "cancel_v"}});
    out.schedule.append(witness_segment("geodesic", 0.0, p.delta, p.v, cancel,
                                        {{"kind", "geodesic"}, {"entries", geo.plan.entries.size()}, {"w2", geo.w2}}));
    out.trajectory = geo.trajectory;
    out.trajectory.field_descriptor = out.schedule.to_json();
    out.final_w1 = final_distance(out.trajectory.back(), p.mu1);
    rep["shortcut"] = "geodesic";
    rep["plan_entries"] = geo.plan.entries.size();
    rep["w2"] = geo.w2;
    rep["final_w1"] = out.final_w1;
    rep["schedule"] = out.schedule.to_json();
    return out;
  }

  const double margin = p.margin.value_or(0.1 * p.omega.inradius());
  const GeometricCheck check = check_geometric_condition(p.v, p.mu0, p.mu1, p.omega, p.horizon, p.tol, margin);
  const Layout g = make_layout(p.omega, check.margin);
  const double third = p.delta / 3.0;
  const double T1 = check.t0_star, T2 = T1 + third, T3 = T2 + third, T4 = T3 + third, T5 = T4 + check.t1_star;
  rep["geometric_condition"] = {{"t0_star", check.t0_star}, {"t1_star", check.t1_star}, {"margin", check.margin}};
  rep["layout"] = layout_json(g);
  rep["phase_times"] = {0.0, T1, T2, T3, T4, T5};

  const TimeField back = scale(p.v, -1.0);
  // Phase 1 and its backward twin: stop on entering the storage region.
  const ParticleMeasure a1 = p.mu0.with_positions(stopped_positions(p.v, g.storage, p.mu0, T1, p.tol));
  const ParticleMeasure b1 = p.mu1.with_positions(stopped_positions(back, g.storage, p.mu1, check.t1_star, p.tol));
  // Phase 2 and twin: funnels stopped on s0.
  FunnelOptions fo;
  fo.tol = p.tol;
  fo.taper = g.taper;
  const FunnelResult ff = funnel_control(p.v, g.omega1, g.s0, third, a1, fo);
  const FunnelResult fb = funnel_control(back, g.omega1, g.s0, third, b1, fo);
  const ParticleMeasure a2 = a1.with_positions(stopped_positions(ff.field.total, g.s0, a1, third, p.tol));
  const ParticleMeasure b2 = b1.with_positions(stopped_positions(fb.field.total, g.s0, b1, third, p.tol));

  // Phase 3: geodesic inside s; one particle per plan entry from t = 0.
  const Region s_region(g.s);
  const GeodesicResult geo = geodesic_transport(a2, b2, third, s_region, snaps + 1);
  const auto& entries = geo.plan.entries;
  std::vector<std::size_t> src_of(entries.size()), tgt_of(entries.size());
  std::vector<double> mass(entries.size());
  for (std::size_t e = 0; e < entries.size(); ++e) {
    src_of[e] = entries[e].source;
    tgt_of[e] = entries[e].target;
    mass[e] = entries[e].mass;
  }
  auto expand = [&](const ParticleMeasure& mu, const std::vector<std::size_t>& idx) {
    std::vector<double> pos;
    pos.reserve(idx.size() * d);
    for (std::size_t i : idx) {
      const auto x = mu.position(i);
      pos.insert(pos.end(), x.begin(), x.end());
    }
    return ParticleMeasure(d, std::move(pos), mass);
  };
  const ParticleMeasure e0 = expand(p.mu0, src_of), e1 = expand(a1, src_of);
  const ParticleMeasure f1 = expand(p.mu1, tgt_of), fb1 = expand(b1, tgt_of);

  out.trajectory = Trajectory(0.0, e0);
  for (double t : times_between(0.0, T1, snaps))
    if (t > 0.0) out.trajectory.append(t, e0.with_positions(stopped_positions(p.v, g.storage, e0, t, p.tol)));
  for (double t : times_between(T1, T2, snaps))
    if (t > T1) out.trajectory.append(t, e1.with_positions(stopped_positions(ff.field.total, g.s0, e1, t - T1, p.tol)));
  for (std::size_t k = 1; k < geo.trajectory.size(); ++k)
    out.trajectory.append(T2 + geo.trajectory.times()[k], geo.trajectory.states()[k]);
  for (double t : times_between(T3, T4, snaps))
    if (t > T3) out.trajectory.append(t, fb1.with_positions(stopped_positions(fb.field.total, g.s0, fb1, T4 - t, p.tol)));
  for (double t : times_between(T4, T5, snaps))
    if (t > T4) out.trajectory.append(t, f1.with_positions(stopped_positions(back, g.storage, f1, T5 - t, p.tol)));
  out.trajectory.field_descriptor = {{"kind", "exact"}, {"entries", entries.size()}};

  // Spatial representatives of the per-particle controls.
  const TimeField cancel_storage = switch_on(g.storage, scale(p.v, -1.0), zero, {{"kind", "cancel_v_on_storage"}});
  const TimeField cancel_s = switch_on(s_region, scale(p.v, -1.0), zero, {{"kind", "cancel_v_on_s"}});
  const TimeField park_f = switch_on(g.s0, scale(p.v, -1.0), ff.field.control, {{"kind", "funnel_stopped"}});
  const TimeField park_b = switch_on(g.s0, scale(p.v, -1.0), scale(fb.field.control, -1.0), {{"kind", "funnel_stopped"}});
  if (T1 > 0.0)
    out.schedule.append(witness_segment("storage", 0.0, T1, p.v, cancel_storage, {{"kind", "stopped_flow"}, {"sign", 1}}));
  out.schedule.append(witness_segment("funnel", T1, T2, p.v, park_f,
                                      {{"kind", "stopped_funnel"}, {"k", ff.k_used}, {"sign", 1}}));
  out.schedule.append(witness_segment("geodesic", T2, T3, p.v, cancel_s,
                                      {{"kind", "geodesic"}, {"entries", entries.size()}, {"w2", geo.w2}}));
  out.schedule.append(witness_segment("funnel", T3, T4, p.v, park_b,
                                      {{"kind", "stopped_funnel"}, {"k", fb.k_used}, {"sign", -1}}));
  if (T5 > T4)
    out.schedule.append(witness_segment("storage", T4, T5, p.v, cancel_storage, {{"kind", "stopped_flow"}, {"sign", -1}}));

  out.final_w1 = final_distance(out.trajectory.back(), p.mu1);
  rep["funnel"] = {{"k_forward", ff.k_used}, {"k_backward", fb.k_used}};
  rep["plan_entries"] = entries.size();
  rep["w2"] = geo.w2;
  rep["final_w1"] = out.final_w1;
  rep["schedule"] = out.schedule.to_json();
  return out;
}

}  // namespace ctrans
