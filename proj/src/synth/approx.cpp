#include "layout.hpp"

#include "ctrans/errors.hpp"
#include "ctrans/integrate.hpp"
#include "ctrans/partition.hpp"
#include "ctrans/synth.hpp"

#include <algorithm>
#include <cmath>

namespace ctrans {

using namespace detail;

namespace {

constexpr double kCap = 1048576.0;
constexpr std::size_t kW1Cap = 2000;

void validate(const ControlProblem& p) {
  if (!p.v.valid()) throw InputError("controller: missing velocity field");
  if (!p.v.meta().autonomous) throw InputError("controller: v must be autonomous");
  if (p.mu0.is_empty() || p.mu1.is_empty()) throw InputError("controller: empty measure");
  if (p.mu0.dim() != p.mu1.dim() || p.mu0.dim() != p.v.dim() || p.omega.dim() != p.v.dim())
    throw InputError("controller: dimension mismatch");
  if (p.v.dim() > 2) throw InputError("controller: only dimensions 1 and 2 are supported");
  if (!(p.delta > 0.0)) throw InputError("controller: delta must be positive");
  if (!(p.epsilon > 0.0)) throw InputError("controller: epsilon must be positive");
  if (std::abs(p.mu0.total_mass() - p.mu1.total_mass()) > 1e-10 * std::max(1.0, p.mu0.total_mass()))
    throw InputError("controller: measures have different total mass");
}

double max_speed(const TimeField& v, const ParticleMeasure& mu) {
  double s = 0.0;
  std::vector<double> w(mu.dim());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    v.evaluate(mu.position(i), 0.0, w);
    double n2 = 0.0;
    for (double c : w) n2 += c * c;
    s = std::max(s, std::sqrt(n2));
  }
  return s;
}

ParticleMeasure to_unit(const ParticleMeasure& mu, const Box& unit) {
  const double len = unit.hi[0] - unit.lo[0];
  return push_forward(mu, [&](std::span<const double> x, std::span<double> o) {
    for (std::size_t a = 0; a < x.size(); ++a) o[a] = (x[a] - unit.lo[a]) / len;
  });
}

// Mass of one side strip cut from a quantile cell to leave its inner cell.
double side_strip_fraction(int n, int dim) {
  const double m = static_cast<double>(n);
  return dim == 1 ? 1.0 / (m * m) : (m - 2.0) / (m * m * m * m);
}

bool same_measure(const ParticleMeasure& a, const ParticleMeasure& b) {
  return a.dim() == b.dim() && a.positions() == b.positions() && a.weights() == b.weights();
}

// Storage on one side: the first (k, floor) pair whose failures stay within
// the budget. Floors above zero keep a fraction of the drift deep inside the
// region; they are tried first because they do not squeeze the stored mass
// into a thin layer.
struct StoragePick {
  double k = 0.0;
  double floor = 0.0;
  ParticleMeasure end;
  std::vector<std::size_t> failures;
};

StoragePick pick_storage(const TimeField& v, const Layout& g, const ParticleMeasure& mu, double duration,
                         double tol, std::size_t budget, const std::vector<double>& floors) {
  StoragePick best;
  bool have = false;
  for (double k = first_k(g.storage); k <= kCap; k *= 2.0) {
    for (double floor : floors) {
      const Segment s = storage_segment(v, g.storage, k, floor, 1, 0.0, duration);
      StoragePick p{k, floor, flow_push(s.total, mu, 0.0, duration, tol), {}};
      p.failures = outside(p.end, g.omega1);
      if (p.failures.empty()) return p;
      if (!have || p.failures.size() < best.failures.size()) best = std::move(p), have = true;
    }
    if (best.failures.size() <= budget) return best;
  }
  return best;
}

}  // namespace

std::optional<int> grid_resolution_for(double target, int dim, int n_cap) {
  for (int n = 3; n <= n_cap; ++n)
    if (grid_error_bound(n, dim) <= target) return n;
  return std::nullopt;
}

double enclosing_cube_edge(const ParticleMeasure& a, const ParticleMeasure& b) {
  const Box ba = a.support_bbox(), bb = b.support_bbox();
  double edge = 0.0;
  for (std::size_t i = 0; i < ba.lo.size(); ++i)
    edge = std::max(edge, std::max(ba.hi[i], bb.hi[i]) - std::min(ba.lo[i], bb.lo[i]));
  return edge * (1.0 + 1e-6) + 1e-12;
}

ControllerResult approx_controller(const ControlProblem& p) {
  validate(p);
  const int d = p.v.dim();
  const double margin = p.margin.value_or(0.1 * p.omega.inradius());
  const std::size_t snaps = std::max<std::size_t>(p.snapshots_per_phase, 1);
  ControllerResult out;
  nlohmann::json& rep = out.report;
  rep["mode"] = "approx";
  rep["epsilon"] = p.epsilon;
  rep["delta"] = p.delta;

  // Nothing to do: hold the particles where they are.
  bool all_in = true;
  for (std::size_t i = 0; i < p.mu0.size() && all_in; ++i) all_in = p.omega.contains(p.mu0.position(i));
  if (all_in && same_measure(p.mu0, p.mu1)) {
    double depth = INFINITY;
    for (std::size_t i = 0; i < p.mu0.size(); ++i) depth = std::min(depth, p.omega.depth(p.mu0.position(i)));
    Segment hold = storage_segment(p.v, p.omega, 2.0 / depth, 0.0, 1, 0.0, p.delta);
    hold.label = "hold";
    out.schedule.append(hold);
    out.trajectory = simulate(out.schedule.total_field(), p.mu0, times_between(0.0, p.delta, snaps), p.tol);
    out.final_w1 = w1_subsampled(out.trajectory.back(), p.mu1, kW1Cap, p.seed);
    rep["shortcut"] = "hold";
    rep["final_w1"] = out.final_w1;
    rep["achieved"] = out.final_w1 <= p.epsilon;
    rep["schedule"] = out.schedule.to_json();
    return out;
  }

  const GeometricCheck check = check_geometric_condition(p.v, p.mu0, p.mu1, p.omega, p.horizon, p.tol, margin);
  const Layout g = make_layout(p.omega, check.margin);
  const double third = p.delta / 3.0;
  const double T1 = check.t0_star, T2 = T1 + third, T3 = T2 + third, T4 = T3 + third, T5 = T4 + check.t1_star;
  rep["geometric_condition"] = {{"t0_star", check.t0_star}, {"t1_star", check.t1_star}, {"margin", check.margin},
                                {"omega0", check.omega0.to_json()}, {"resolution", check.resolution}};
  rep["layout"] = layout_json(g);
  rep["phase_times"] = {0.0, T1, T2, T3, T4, T5};

  // Untouched mass eps / (2 d Rbar) on each side.
  double sup_v = p.v.sup_bound();
  std::string sup_source = "field bound";
  if (!std::isfinite(sup_v)) {
    sup_v = std::max(max_speed(p.v, p.mu0), max_speed(p.v, p.mu1));
    sup_source = "largest speed at the support points";
  }
  const double R = enclosing_cube_edge(p.mu0, p.mu1);
  const double Rbar = R + T5 * sup_v;
  const double untouched_target = p.epsilon / (2.0 * d * Rbar);
  const double w0 = p.mu0.max_weight(), w1 = p.mu1.max_weight();
  const auto budget0 = static_cast<std::size_t>(std::llround(untouched_target / w0));
  const auto budget1 = static_cast<std::size_t>(std::llround(untouched_target / w1));

  // Phase 1: forward storage with exact parking.
  const StoragePick fwd = pick_storage(p.v, g, p.mu0, T1, p.tol, budget0, {0.0});
  const ParticleMeasure mu_t1 = tag_untouched(fwd.end, fwd.failures, budget0, p.seed ^ 0x5151);
  const ParticleMeasure mu0_tagged = p.mu0.with_tags(mu_t1.tags());

  // Phase 5 synthesized backward on mu1.
  const StoragePick bwd = pick_storage(scale(p.v, -1.0), g, p.mu1, check.t1_star, p.tol, budget1,
                                       {0.5, 0.25, 0.125, 0.0625, 0.0});
  const ParticleMeasure nu1 = tag_untouched(bwd.end, bwd.failures, budget1, p.seed ^ 0xa7a7);
  const ParticleMeasure mu1_tagged = p.mu1.with_tags(nu1.tags());

  // Phases 2 and 4: funnels into s0 on both sides.
  FunnelOptions fo;
  fo.tol = p.tol;
  fo.taper = g.taper;
  fo.inside_at_end = true;
  const FunnelResult ff = funnel_control(p.v, g.omega1, g.s0, third, mu_t1.select_tag(0), fo);
  const FunnelResult fb = funnel_control(scale(p.v, -1.0), g.omega1, g.s0, third, nu1.select_tag(0), fo);
  const ParticleMeasure mu_t2 = flow_push(ff.field.total, mu_t1, 0.0, third, p.tol);
  const ParticleMeasure nu2 = flow_push(fb.field.total, nu1, 0.0, third, p.tol);

  Segment s1 = storage_segment(p.v, g.storage, fwd.k, fwd.floor, 1, 0.0, T1);
  Segment s2 = funnel_segment(p.v, g.omega1, g.s0, ff.k_used, g.taper, 1, T1, T2);
  Segment s4 = funnel_segment(p.v, g.omega1, g.s0, fb.k_used, g.taper, -1, T3, T4);
  Segment s5 = storage_segment(p.v, g.storage, bwd.k, bwd.floor, -1, T4, T5);

  // Phase 3: grid in the unit box inside s.
  const ParticleMeasure src = to_unit(mu_t2.select_tag(0), g.unit);
  const ParticleMeasure tgt = to_unit(nu2.select_tag(0), g.unit);
  const double lip_back = std::max(s4.total.lipschitz(), s5.total.lipschitz());
  const double target = p.epsilon / (2.0 * std::exp(2.0 * lip_back * (T5 - T3)));
  int n = 0;
  std::string n_reason;
  if (p.n) {
    n = *p.n;
    n_reason = "scenario";
  } else {
    const auto by_bound = grid_resolution_for(target, d);
    n = by_bound.value_or(64);
    n_reason = by_bound ? "bound" : "capped at 64";
    // Every inner cell and every strip between inner cells should hold a few
    // particles; thinner strips make the blended field's Lipschitz constant,
    // and with it the RK4 step count, explode.
    const double controlled = static_cast<double>(std::min(src.size(), tgt.size()));
    while (n > 3 && controlled * std::min(inner_cell_fraction(n, d), side_strip_fraction(n, d)) < 4.0) --n;
    if (by_bound && n < *by_bound) n_reason = "limited by particle count";
    else if (!by_bound) n_reason = "capped at 64, then limited by particle count";
  }
  const auto [pa, pb] = quantile_partition(src, tgt, n);
  const GridControl grid(pa, pb, third);
  Segment s3 = grid_segment(p.v, grid, g.s, g.unit, T2);

  for (Segment* s : {&s1, &s2, &s3, &s4, &s5})
    if (s->t_end > s->t_start || s == &s3) out.schedule.append(std::move(*s));

  // Simulate the full schedule.
  std::vector<double> times{0.0};
  const double bounds[] = {0.0, T1, T2, T3, T4, T5};
  for (int k = 0; k < 5; ++k) {
    if (!(bounds[k + 1] > bounds[k])) continue;
    const auto seg = times_between(bounds[k], bounds[k + 1], snaps);
    times.insert(times.end(), seg.begin() + 1, seg.end());
  }
  out.trajectory = simulate(out.schedule.total_field(), mu0_tagged, times, p.tol);
  out.trajectory.field_descriptor = out.schedule.to_json();
  const ParticleMeasure& final_state = out.trajectory.back();

  out.final_w1 = w1_subsampled(final_state, mu1_tagged, kW1Cap, p.seed);
  nlohmann::json decomposition = nullptr;
  if (final_state.size() <= kW1Cap && mu1_tagged.size() <= kW1Cap) {
    const auto c0 = final_state.select_tag(0), c1 = mu1_tagged.select_tag(0);
    const auto a0 = final_state.select_tag(1), a1 = mu1_tagged.select_tag(1);
    if (std::abs(c0.total_mass() - c1.total_mass()) <= 1e-12) {
      const double wc = wp_discrete(c0, c1, 1).distance;
      const double wa = a0.is_empty() ? 0.0 : wp_discrete(a0, a1, 1).distance;
      decomposition = {{"controlled", wc}, {"untouched", wa}, {"holds", out.final_w1 <= wc + wa + 1e-12}};
    }
  }

  // Phase 1 diagnostics: mass inside omega at T1 and the parked particles.
  double inside_mass = 0.0, parked_speed = 0.0;
  std::size_t parked = 0, lattice_points = 0;
  double lattice_speed = 0.0;
  {
    const Segment& st = out.schedule.segments().front();
    std::vector<double> w(d), grad(d);
    for (std::size_t i = 0; i < mu_t1.size(); ++i) {
      const auto x = mu_t1.position(i);
      if (p.omega.contains(x)) inside_mass += mu_t1.weight(i);
      if (fwd.k * region_depth(g.storage, x, grad) >= 1.0) {
        ++parked;
        st.total.evaluate(x, T1, w);
        for (double c : w) parked_speed = std::max(parked_speed, std::abs(c));
      }
    }
    // Smooth parking is approached but never reached in finite time, so the
    // parked set is also probed directly on a lattice.
    const Box bb = g.storage.bounding_box();
    const int per_axis = 64;
    std::vector<double> x(d);
    std::size_t total_points = 1;
    for (int a = 0; a < d; ++a) total_points *= per_axis;
    for (std::size_t q = 0; q < total_points; ++q) {
      std::size_t r = q;
      for (int a = 0; a < d; ++a, r /= per_axis)
        x[a] = bb.lo[a] + (bb.hi[a] - bb.lo[a]) * ((static_cast<double>(r % per_axis) + 0.5) / per_axis);
      if (fwd.k * region_depth(g.storage, x, grad) < 1.0) continue;
      ++lattice_points;
      for (double t : {0.0, 0.5 * T1, T1}) {
        st.total.evaluate(x, t, w);
        for (double c : w) lattice_speed = std::max(lattice_speed, std::abs(c));
      }
    }
  }

  std::size_t untouched0 = 0;
  double untouched_mass = 0.0;
  for (std::size_t i = 0; i < mu0_tagged.size(); ++i)
    if (mu0_tagged.tag(i) == 1) ++untouched0, untouched_mass += mu0_tagged.weight(i);

  rep["storage"] = {{"k_forward", fwd.k},
                    {"failures_forward", fwd.failures.size()},
                    {"k_backward", bwd.k},
                    {"floor_backward", bwd.floor},
                    {"failures_backward", bwd.failures.size()},
                    {"mass_inside_omega_after_phase1", inside_mass},
                    {"parked_particles", parked},
                    {"parked_max_speed", parked_speed},
                    {"parked_set_lattice_points", lattice_points},
                    {"parked_set_max_speed", lattice_speed}};
  rep["funnel"] = {{"k_forward", ff.k_used}, {"k_backward", fb.k_used},
                   {"kappa0", ff.eta.kappa0}, {"kappa1", ff.eta.kappa1}};
  rep["grid"] = {{"n", n},
                 {"n_reason", n_reason},
                 {"bound_target", target},
                 {"paper_bound", grid_error_bound(n, d)},
                 {"lipschitz", grid.lipschitz()},
                 {"min_denominator", grid.min_denominator()},
                 {"warnings", pa.warnings}};
  rep["untouched"] = {{"R", R},
                      {"Rbar", Rbar},
                      {"sup_v", sup_v},
                      {"sup_v_source", sup_source},
                      {"target_mass", untouched_target},
                      {"count", untouched0},
                      {"mass", untouched_mass},
                      {"particle_weight", w0}};
  rep["final_w1"] = out.final_w1;
  rep["w1_particles"] = std::min<std::size_t>(final_state.size(), kW1Cap);
  rep["decomposition"] = decomposition;
  rep["achieved"] = out.final_w1 <= p.epsilon;
  rep["schedule"] = out.schedule.to_json();
  return out;
}

Segment rebuild_segment(const nlohmann::json& j, const TimeField& v) {
  try {
    if (j.at("witness").get<bool>()) throw InputError("rebuild_segment: witness segments have no spatial field");
    const auto& f = j.at("field");
    const std::string kind = f.at("kind").get<std::string>();
    const double t0 = j.at("t_start").get<double>(), t1 = j.at("t_end").get<double>();
    Segment s;
    if (kind == "storage") {
      s = storage_segment(v, Region::from_json(f.at("region")), f.at("k").get<double>(), f.at("floor").get<double>(),
                          f.at("sign").get<int>(), t0, t1);
    } else if (kind == "funnel") {
      s = funnel_segment(v, Region::from_json(f.at("omega1")), Region::from_json(f.at("s0")), f.at("k").get<double>(),
                         f.at("taper").get<double>(), f.at("sign").get<int>(), t0, t1);
    } else if (kind == "grid") {
      const auto bbox = [](const nlohmann::json& r) { return Region::from_json(r).bounding_box(); };
      s = grid_segment(v, GridControl::from_json(f.at("grid")), bbox(f.at("s")), bbox(f.at("unit")),
                       f.at("t0").get<double>());
    } else {
      throw InputError("rebuild_segment: unknown field kind '" + kind + "'");
    }
    s.label = j.at("label").get<std::string>();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("rebuild_segment: ") + e.what());
  }
}

}  // namespace ctrans
