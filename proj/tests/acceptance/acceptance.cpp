// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero when any fails. Tolerances and runtime limits are the
// criteria's own; nothing here is loosened to make a run pass.

#include "ctrans/app.hpp"
#include "ctrans/density.hpp"
#include "ctrans/errors.hpp"
#include "ctrans/integrate.hpp"
#include "ctrans/oracle.hpp"
#include "ctrans/ot.hpp"
#include "ctrans/partition.hpp"
#include "ctrans/random.hpp"
#include "ctrans/synth.hpp"
#include "ctrans/trajectory.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

using namespace ctrans;

namespace {

const std::filesystem::path kScenarios = std::filesystem::path(CTRANS_SOURCE_DIR) / "scenarios";

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

ParticleMeasure cloud(Rng& rng, int dim, std::size_t n, double lo, double hi) {
  std::vector<double> pos(n * dim);
  for (double& x : pos) x = rng.uniform(lo, hi);
  return ParticleMeasure::uniform_weights(dim, std::move(pos));
}

ParticleMeasure shifted(const ParticleMeasure& mu, std::vector<double> offset) {
  std::vector<double> pos = mu.positions();
  for (std::size_t k = 0; k < pos.size(); ++k) pos[k] += offset[k % offset.size()];
  return mu.with_positions(std::move(pos));
}

// ---- 1 ---------------------------------------------------------------------
Outcome grid_bound() {
  const Scenario s = Scenario::load(kScenarios / "study_uniform.json");
  Outcome o{true, ""};
  for (int n : {4, 8, 16}) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto rows = convergence_study(s, {n});
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const auto& r = rows.front();
    const double bound = 2.0 * (n - 2.0) * (n - 2.0) / (n * n * n) + 8.0 * (n - 1.0) / (n * n);
    const bool ok = r.measured_w1 <= bound + 3.0 * r.sample_error && secs < 120.0 &&
                    std::abs(r.paper_bound - bound) <= 1e-15;
    o.pass = o.pass && ok;
    o.detail += "n=" + std::to_string(n) + " W1=" + fmt(r.measured_w1) + " bound=" + fmt(bound) +
                " eps_sample=" + fmt(r.sample_error) + " (" + fmt(secs) + "s); ";
  }
  return o;
}

// ---- 2 ---------------------------------------------------------------------
Outcome ot_oracle() {
  Rng rng(2024);
  double worst = 0.0, worst_1d = 0.0;
  for (int k = 0; k < 500; ++k) {
    const int d = 1 + k % 2, p = 1 + (k / 2) % 2;
    const std::size_t n = 1 + rng.index(8);
    const auto a = cloud(rng, d, n, -1.0, 1.0), b = cloud(rng, d, n, -0.5, 1.5);
    worst = std::max(worst, std::abs(wp_discrete(a, b, p).distance - oracle::brute_force_wp(a, b, p)));
  }
  for (int k = 0; k < 200; ++k) {
    const std::size_t n = 1 + rng.index(60), m = 1 + rng.index(60);
    const auto a = cloud(rng, 1, n, -2.0, 1.0), b = cloud(rng, 1, m, -1.0, 2.0);
    worst_1d = std::max(worst_1d, std::abs(w1_1d(a, b) - wp_discrete(a, b, 1).distance));
  }
  return {worst <= 1e-10 && worst_1d <= 1e-9,
          "max |wp - brute| = " + fmt(worst) + ", max |w1_1d - wp| = " + fmt(worst_1d)};
}

// ---- 3 ---------------------------------------------------------------------
Outcome closed_form() {
  const auto rows = sqrt_split_study({10000, 100000}, 1);
  const bool ok = rows[0].w1_error <= 5e-3 && rows[1].w1_error < rows[0].w1_error;
  return {ok, "N=1e4: " + fmt(rows[0].w1_error) + ", N=1e5: " + fmt(rows[1].w1_error)};
}

// ---- 4 ---------------------------------------------------------------------
// w(x) = A x + b + c sin(<k, x> + phase), whose Jacobian A + c k^T cos(..) has
// spectral norm at most |A|_F + |c| |k|.
TimeField lipschitz_field(Rng& rng, int d, double& lip) {
  std::vector<double> a(d * d), b(d), c(d), kv(d);
  for (double& x : a) x = rng.uniform(-1.0, 1.0);
  for (double& x : b) x = rng.uniform(-1.0, 1.0);
  for (double& x : c) x = rng.uniform(-0.5, 0.5);
  for (double& x : kv) x = rng.uniform(-2.0, 2.0);
  const double phase = rng.uniform(0.0, 6.0);
  double fa = 0.0, nc = 0.0, nk = 0.0;
  for (double x : a) fa += x * x;
  for (double x : c) nc += x * x;
  for (double x : kv) nk += x * x;
  lip = std::sqrt(fa) + std::sqrt(nc) * std::sqrt(nk);
  FieldMeta m;
  m.lipschitz = lip;
  m.sup_bound = INFINITY;
  return TimeField(d, [a, b, c, kv, phase, d](std::span<const double> x, double, std::span<double> o) {
    double arg = phase;
    for (int j = 0; j < d; ++j) arg += kv[j] * x[j];
    const double s = std::sin(arg);
    for (int i = 0; i < d; ++i) {
      double v = b[i] + c[i] * s;
      for (int j = 0; j < d; ++j) v += a[i * d + j] * x[j];
      o[i] = v;
    }
  }, m);
}

Outcome gronwall() {
  Rng rng(77);
  double worst_ratio = 0.0;
  bool ok = true;
  for (int k = 0; k < 50; ++k) {
    const int d = 1 + k % 2;
    double lip = 0.0;
    const TimeField w = lipschitz_field(rng, d, lip);
    const auto mu = cloud(rng, d, 40, -1.0, 1.0), nu = cloud(rng, d, 40, -0.5, 1.5);
    const double t = rng.uniform(0.2, 1.5);
    const double before = wp_discrete(mu, nu, 1).distance;
    const double after = wp_discrete(flow_push(w, mu, 0.0, t, 1e-10), flow_push(w, nu, 0.0, t, 1e-10), 1).distance;
    const double bound = std::exp(2.0 * lip * t) * before * (1.0 + 1e-3);
    ok = ok && after <= bound;
    worst_ratio = std::max(worst_ratio, after / bound);
  }
  return {ok, "largest W1(after) / bound = " + fmt(worst_ratio)};
}

// ---- 5 ---------------------------------------------------------------------
Outcome geodesic_speed() {
  Rng rng(5);
  const Region s(Box{{0.0, 0.0}, {1.0, 1.0}});
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const std::size_t n = 5 + rng.index(40);
    const auto mu0 = cloud(rng, 2, n, 0.05, 0.5), mu1 = cloud(rng, 2, n, 0.4, 0.95);
    const double delta = rng.uniform(0.2, 2.0);
    const GeodesicResult g = geodesic_transport(mu0, mu1, delta, s, 3);
    const double total = wp_discrete(mu0, mu1, 2).distance;
    for (int q = 0; q < 10; ++q) {
      const double a = rng.uniform(0.0, delta), b = rng.uniform(0.0, delta);
      const auto ma = displacement_interpolate(g.plan, a, delta), mb = displacement_interpolate(g.plan, b, delta);
      worst = std::max(worst, std::abs(wp_discrete(ma, mb, 2).distance - std::abs(a - b) / delta * total));
    }
  }
  return {worst <= 1e-8, "max deviation from constant speed = " + fmt(worst)};
}

// ---- 6 ---------------------------------------------------------------------
Outcome exact_control() {
  Rng rng(6);
  const Region omega(Box{{4.0, -3.0}, {6.0, 3.0}});
  double worst = 0.0, worst_outside = 0.0;
  for (int k = 0; k < 20; ++k) {
    ControlProblem p;
    p.v = constant_field({1.0, rng.uniform(-0.2, 0.2)});
    p.omega = omega;
    p.delta = rng.uniform(0.3, 1.5);
    p.horizon = 30.0;
    const std::size_t n = 4 + rng.index(20);
    auto one = [&](double x0) { return shifted(cloud(rng, 2, n, 0.0, 0.6), {x0, -0.3}); };
    auto two = [&](double x0) {
      const auto a = cloud(rng, 2, n / 2, 0.0, 0.3), b = cloud(rng, 2, n - n / 2, 0.0, 0.3);
      return ParticleMeasure::uniform_weights(2, shifted(a, {x0, -1.0}).concat(shifted(b, {x0 + 0.2, 0.8})).positions());
    };
    if (k == 0) {
      p.mu0 = two(0.5), p.mu1 = one(9.0);
    } else if (k == 1) {
      p.mu0 = one(0.5), p.mu1 = two(9.0);
    } else {
      p.mu0 = k % 3 == 0 ? two(rng.uniform(0.0, 2.0)) : one(rng.uniform(0.0, 2.0));
      p.mu1 = k % 4 == 0 ? two(rng.uniform(8.0, 10.0)) : one(rng.uniform(8.0, 10.0));
    }
    const ControllerResult r = exact_controller(p);
    worst = std::max(worst, wp_discrete(r.trajectory.back(), p.mu1, 1).distance);
    for (double m : r.schedule.control_outside(omega, Box{{-2.0, -6.0}, {12.0, 6.0}}, 10000, 100 + k))
      worst_outside = std::max(worst_outside, m);
  }
  return {worst <= 1e-9 && worst_outside == 0.0,
          "max final W1 = " + fmt(worst) + ", max |control| outside omega = " + fmt(worst_outside)};
}

// ---- 7 and 8 ---------------------------------------------------------------
struct FigureRun {
  Scenario scenario;
  ControlProblem problem;
  ControllerResult result;
  double seconds = 0.0;
};

const FigureRun& figure1() {
  static const FigureRun run = [] {
    FigureRun f;
    f.scenario = Scenario::load(kScenarios / "figure1.json");
    f.problem = f.scenario.problem();
    const auto t0 = std::chrono::steady_clock::now();
    f.result = approx_controller(f.problem);
    f.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return f;
  }();
  return run;
}

Outcome approximate_control() {
  const FigureRun& f = figure1();
  const auto& rep = f.result.report;
  const double eps = f.problem.epsilon;
  const double w1 = wp_discrete(f.result.trajectory.back(), f.problem.mu1, 1).distance;
  // The untouched mass target from scratch: cube edge over both supports,
  // horizon from the phase times, sup |v| = sqrt(1 + a^2) for the preset.
  const Box ba = f.problem.mu0.support_bbox(), bb = f.problem.mu1.support_bbox();
  double edge = 0.0;
  for (int a = 0; a < 2; ++a) edge = std::max(edge, std::max(ba.hi[a], bb.hi[a]) - std::min(ba.lo[a], bb.lo[a]));
  const double amp = f.scenario.v.at("amplitude").get<double>();
  const double horizon = rep.at("phase_times").back().get<double>();
  const double target = eps / (2.0 * 2.0 * (edge + horizon * std::sqrt(1.0 + amp * amp)));
  const auto& start = f.result.trajectory.front();
  double untouched = 0.0;
  for (std::size_t i = 0; i < start.size(); ++i)
    if (start.tag(i) == 1) untouched += start.weight(i);
  const double weight = start.max_weight();
  const int n = rep.at("grid").at("n").get<int>();
  const bool auto_n = !f.scenario.params.n.has_value();
  const bool ok = w1 <= eps && std::abs(untouched - target) <= weight * (1.0 + 1e-6) && auto_n && f.seconds < 300.0;
  return {ok, "final W1 = " + fmt(w1) + " (eps " + fmt(eps) + "), auto n = " + std::to_string(n) + ", untouched mass " +
                  fmt(untouched) + " vs target " + fmt(target) + " (particle weight " + fmt(weight) + "), " +
                  fmt(f.seconds) + "s"};
}

Outcome storage() {
  const FigureRun& f = figure1();
  const auto& rep = f.result.report;
  const double t1 = rep.at("phase_times")[1].get<double>();
  const auto& times = f.result.trajectory.times();
  std::size_t at = times.size();
  for (std::size_t k = 0; k < times.size(); ++k)
    if (times[k] == t1) at = k;
  if (at == times.size()) return {false, "no snapshot at the end of phase 1"};
  const auto& state = f.result.trajectory.states()[at];
  double inside = 0.0;
  for (std::size_t i = 0; i < state.size(); ++i)
    if (f.problem.omega.contains(state.position(i))) inside += state.weight(i);

  // Parked set: depth at least 1/k in the storage region.
  const Segment& seg = f.result.schedule.segments().front();
  const Region region = Region::from_json(rep.at("layout").at("storage_region"));
  const double k = rep.at("storage").at("k_forward").get<double>();
  double parked_speed = 0.0;
  std::size_t parked_particles = 0, lattice = 0;
  std::vector<double> w(2);
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (k * region.depth(state.position(i)) < 1.0) continue;
    ++parked_particles;
    seg.total.evaluate(state.position(i), t1, w);
    parked_speed = std::max({parked_speed, std::abs(w[0]), std::abs(w[1])});
  }
  Rng rng(8);
  const Box bb = region.bounding_box();
  for (int q = 0; q < 20000; ++q) {
    const std::vector<double> x{rng.uniform(bb.lo[0], bb.hi[0]), rng.uniform(bb.lo[1], bb.hi[1])};
    if (k * region.depth(x) < 1.0) continue;
    ++lattice;
    seg.total.evaluate(x, rng.uniform(0.0, t1), w);
    parked_speed = std::max({parked_speed, std::abs(w[0]), std::abs(w[1])});
  }
  const double eps = f.problem.epsilon;
  const bool ok = inside >= 1.0 - eps && parked_speed == 0.0 && lattice > 0;
  return {ok, "mass in omega after phase 1 = " + fmt(inside) + ", parked particles " + std::to_string(parked_particles) +
                  ", parked-set samples " + std::to_string(lattice) + ", max speed there = " + fmt(parked_speed)};
}

// ---- 9 ---------------------------------------------------------------------
Outcome bv_blowup() {
  const auto t0 = std::chrono::steady_clock::now();
  const int levels = 20;
  const BvTable t = bv_blowup_diagnostic(linear_merge_toy(1.0, levels), levels);
  bool increasing = t.rows.size() == static_cast<std::size_t>(levels);
  bool logarithmic = increasing;
  double worst = INFINITY;
  for (std::size_t k = 0; k < t.rows.size(); ++k) {
    if (k > 0 && !(t.rows[k].integral > t.rows[k - 1].integral)) increasing = false;
    const double floor = 0.9 * t.rows[k].level * std::log(2.0);
    if (!(t.rows[k].integral > floor)) logarithmic = false;
    worst = std::min(worst, t.rows[k].integral / (t.rows[k].level * std::log(2.0)));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {increasing && logarithmic && secs < 10.0,
          std::to_string(t.rows.size()) + " rows, smallest integral / (m ln2) = " + fmt(worst) + ", " + fmt(secs) + "s"};
}

// ---- 10 --------------------------------------------------------------------
Outcome weak_residual_order() {
  Rng rng(10);
  const auto src = sample(DensitySpec::uniform_box(Box{{0.0, 0.0}, {0.8, 0.8}}), 2000, 1);
  const auto tgt = sample(DensitySpec::uniform_box(Box{{0.2, 0.2}, {1.0, 1.0}}), 2000, 2);
  const auto [pa, pb] = quantile_partition(src, tgt, 4);
  const GridControl grid(pa, pb, 1.0);
  const TimeField field = grid.field();
  std::vector<TestFunction> tests;
  for (int k = 0; k < 5; ++k)
    tests.push_back(bump_test_function({rng.uniform(0.3, 0.7), rng.uniform(0.3, 0.7)}, rng.uniform(0.3, 0.5)));
  // Start refining once a snapshot interval is short against the field's
  // time scale (h L <= 0.1); coarser grids are still pre-asymptotic.
  std::size_t first = 1;
  while (first < 10.0 * field.lipschitz()) first *= 2;
  std::vector<std::vector<double>> res;
  for (std::size_t intervals : {first, 2 * first, 4 * first})
    res.push_back(weak_residual(simulate(field, src, time_grid(0.0, 1.0, intervals), 1e-12), field, tests));
  double worst = INFINITY;
  for (std::size_t j = 0; j < tests.size(); ++j)
    for (std::size_t r = 1; r < res.size(); ++r) worst = std::min(worst, std::log2(res[r - 1][j] / res[r][j]));
  return {worst >= 1.8, "snapshot intervals " + std::to_string(first) + "/" + std::to_string(2 * first) + "/" +
                            std::to_string(4 * first) + ", smallest observed order = " + fmt(worst)};
}

}  // namespace

int main() {
  // Wall-clock limits in seconds; criteria with their own limits check them inside.
  struct Criterion {
    std::string name;
    std::function<Outcome()> run;
    double limit = INFINITY;
  };
  const std::vector<Criterion> criteria{
      {"grid-control bound", grid_bound},
      {"OT oracle equivalence", ot_oracle, 30.0},
      {"closed-form square-root transport", closed_form, 60.0},
      {"Gronwall flow estimate", gronwall, 60.0},
      {"geodesic constant speed", geodesic_speed, 30.0},
      {"exact controllability", exact_control, 300.0},
      {"approximate controllability (figure 1)", approximate_control},
      {"storage control (figure 1)", storage},
      {"BV blowup", bv_blowup},
      {"weak-solution residual order", weak_residual_order},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      o = criteria[k].run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs >= criteria[k].limit) {
      o.pass = false;
      o.detail += " over the " + fmt(criteria[k].limit) + "s limit";
    }
    if (!o.pass) ++failed;
    std::cout << "criterion " << (k + 1) << " [" << criteria[k].name << "]: " << (o.pass ? "PASS" : "FAIL") << "  "
              << o.detail << "  [" << fmt(secs) << "s]" << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
