#include "ctrans/app.hpp"

#include "ctrans/errors.hpp"
#include "ctrans/geometry.hpp"
#include "ctrans/trajectory.hpp"

#include <filesystem>
#include <ostream>

namespace ctrans {

namespace {

Scenario load_with_overrides(const CommandOptions& o) {
  if (o.scenario.empty()) throw InputError("--scenario is required");
  Scenario s = Scenario::load(o.scenario);
  if (o.seed_override) s.params.seed = *o.seed_override;
  if (o.particles) {
    if (*o.particles == 0) throw InputError("--particles must be positive");
    s.params.particles = *o.particles;
  }
  return s;
}

void prepare_out(const std::filesystem::path& out) {
  if (out.empty()) throw InputError("--out is required");
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (ec) throw InputError(out.string() + ": cannot create output directory: " + ec.message());
}

nlohmann::json counterexample_json(const GeometricConditionError& e) {
  return {{"message", e.what()},
          {"point", e.point()},
          {"direction", e.forward() ? "forward" : "backward"},
          {"particle", e.index()}};
}

nlohmann::json base_report(const Scenario& s, const std::string& command) {
  return {{"command", command}, {"scenario", s.to_json()}, {"defaults_applied", s.defaults_applied}};
}

void write_json(const std::filesystem::path& path, nlohmann::json j, const Provenance& prov) {
  prov.stamp(j);
  write_text(path, j.dump(2) + "\n");
}

}  // namespace

int run_command(const CommandOptions& o, std::ostream& log) {
  if (o.mode != "approx" && o.mode != "exact") throw InputError("--mode must be approx or exact");
  const Scenario s = load_with_overrides(o);
  prepare_out(o.out);
  const Provenance prov(s.hash());
  nlohmann::json report = base_report(s, "run");
  report["mode"] = o.mode;
  try {
    const ControlProblem problem = s.problem();
    const ControllerResult r = o.mode == "approx" ? approx_controller(problem) : exact_controller(problem);
    report["status"] = "ok";
    report["final_w1"] = r.final_w1;
    report["controller"] = r.report;
    report["controller"].erase("schedule");
    nlohmann::json sched = r.schedule.to_json();
    write_json(o.out / "schedule.json", std::move(sched), prov);
    write_trajectory(o.out / "trajectory", r.trajectory, prov);
    write_json(o.out / "report.json", report, prov);
    log << s.name << " [" << o.mode << "]: final W1 = " << r.final_w1 << ", " << r.schedule.segments().size()
        << " segments, " << r.trajectory.size() << " snapshots -> " << o.out.string() << "\n";
    return 0;
  } catch (const GeometricConditionError& e) {
    report["status"] = "geometric_condition_failed";
    report["counterexample"] = counterexample_json(e);
    write_json(o.out / "report.json", report, prov);
    log << "geometric condition fails: " << e.what() << "\n";
    return 2;
  }
}

int check_command(const CommandOptions& o, std::ostream& log) {
  const Scenario s = load_with_overrides(o);
  const Provenance prov(s.hash());
  nlohmann::json report = base_report(s, "check");
  int code = 0;
  try {
    const ParticleMeasure mu0 = s.sample_mu0(), mu1 = s.sample_mu1();
    const double margin = s.params.margin.value_or(0.1 * s.omega.inradius());
    const GeometricCheck c =
        check_geometric_condition(s.velocity(), mu0, mu1, s.omega, s.params.horizon, s.params.tol, margin);
    report["status"] = "ok";
    report["t0_star"] = c.t0_star;
    report["t1_star"] = c.t1_star;
    report["margin"] = c.margin;
    report["omega0"] = c.omega0.to_json();
    report["omega0_fallback"] = c.omega0_fallback;
    report["particles_checked"] = c.resolution;
    log << s.name << ": condition holds, T0* = " << c.t0_star << ", T1* = " << c.t1_star << "\n";
  } catch (const GeometricConditionError& e) {
    report["status"] = "geometric_condition_failed";
    report["counterexample"] = counterexample_json(e);
    log << "geometric condition fails: " << e.what() << "\n";
    code = 2;
  }
  if (!o.out.empty()) {
    prepare_out(o.out);
    write_json(o.out / "check.json", report, prov);
  }
  return code;
}

}  // namespace ctrans
