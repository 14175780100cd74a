#include "ctrans/trajectory.hpp"

#include "ctrans/errors.hpp"
#include "ctrans/integrate.hpp"
#include "ctrans/text.hpp"

#include <cmath>
#include <cstdio>

namespace ctrans {

Trajectory::Trajectory(double t, ParticleMeasure state) {
  times_.push_back(t);
  states_.push_back(std::move(state));
}

void Trajectory::append(double t, ParticleMeasure state) {
  if (!times_.empty()) {
    if (!(t > times_.back())) throw InputError("Trajectory: times must increase");
    if (state.size() != states_.front().size())
      throw InputError("Trajectory: particle count changed");
    if (state.weights() != states_.front().weights())
      throw InputError("Trajectory: particle weights changed");
  }
  times_.push_back(t);
  states_.push_back(std::move(state));
}

void Trajectory::extend(const Trajectory& next) {
  for (std::size_t i = 0; i < next.size(); ++i) {
    if (i == 0 && !times_.empty() && next.times_[0] == times_.back()) continue;
    append(next.times_[i], next.states_[i]);
  }
}

std::vector<double> time_grid(double t0, double t1, std::size_t intervals) {
  if (intervals == 0) throw InputError("time_grid: need at least one interval");
  std::vector<double> ts(intervals + 1);
  for (std::size_t i = 0; i <= intervals; ++i)
    ts[i] = i == intervals ? t1 : t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(intervals);
  return ts;
}

Trajectory simulate(const TimeField& field, const ParticleMeasure& mu,
                    const std::vector<double>& times, double tol) {
  if (times.empty()) throw InputError("simulate: no times");
  Trajectory traj(times.front(), mu);
  for (std::size_t i = 1; i < times.size(); ++i)
    traj.append(times[i], flow_push(field, traj.back(), times[i - 1], times[i], tol));
  traj.field_descriptor = field.descriptor();
  traj.tol = tol;
  return traj;
}

void write_trajectory(const std::filesystem::path& dir, const Trajectory& traj, const Provenance& prov) {
  nlohmann::json snaps = nlohmann::json::array();
  for (std::size_t i = 0; i < traj.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "snapshot_%04zu.csv", i);
    write_text(dir / name, measure_to_csv(traj.states()[i], prov));
    snaps.push_back({{"file", name},
                     {"time", format_double(traj.times()[i])},
                     {"checksum", measure_checksum(traj.states()[i])}});
  }
  nlohmann::json manifest{{"snapshots", snaps},
                          {"field", traj.field_descriptor},
                          {"integrator", {{"method", "rk4"}, {"tol", format_double(traj.tol)}}},
                          {"particles", traj.size() ? traj.front().size() : 0},
                          {"total_mass", traj.size() ? format_double(traj.front().total_mass()) : "0"}};
  prov.stamp(manifest);
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
}

TestFunction bump_test_function(std::vector<double> center, double radius) {
  if (!(radius > 0.0)) throw InputError("bump_test_function: radius must be positive");
  TestFunction f;
  f.name = "bump";
  f.value = [center, radius](std::span<const double> x) {
    double r2 = 0.0;
    for (std::size_t a = 0; a < center.size(); ++a) {
      const double d = (x[a] - center[a]) / radius;
      r2 += d * d;
    }
    return r2 < 1.0 ? std::exp(-1.0 / (1.0 - r2)) : 0.0;
  };
  f.gradient = [center, radius](std::span<const double> x, std::span<double> g) {
    double r2 = 0.0;
    for (std::size_t a = 0; a < center.size(); ++a) {
      const double d = (x[a] - center[a]) / radius;
      r2 += d * d;
    }
    if (!(r2 < 1.0)) {
      for (auto& v : g) v = 0.0;
      return;
    }
    const double s = 1.0 - r2;
    // d/dx exp(-1/s) = exp(-1/s) / s^2 * ds/dx, ds/dx = -2 (x - c) / radius^2
    const double factor = std::exp(-1.0 / s) / (s * s) * (-2.0 / (radius * radius));
    for (std::size_t a = 0; a < center.size(); ++a) g[a] = factor * (x[a] - center[a]);
  };
  return f;
}

std::vector<double> weak_residual(const Trajectory& traj, const TimeField& field,
                                  const std::vector<TestFunction>& tests) {
  if (traj.size() < 3) throw InputError("weak_residual: need at least three snapshots");
  const std::size_t k = traj.size();
  const int d = traj.front().dim();
  std::vector<double> out(tests.size(), 0.0);
  std::vector<double> g(d);
  for (std::size_t f = 0; f < tests.size(); ++f) {
    std::vector<double> integral(k, 0.0);
    for (std::size_t s = 0; s < k; ++s) {
      const auto& mu = traj.states()[s];
      for (std::size_t i = 0; i < mu.size(); ++i) integral[s] += mu.weight(i) * tests[f].value(mu.position(i));
    }
    for (std::size_t s = 1; s + 1 < k; ++s) {
      const double hm = traj.times()[s] - traj.times()[s - 1];
      const double hp = traj.times()[s + 1] - traj.times()[s];
      const double deriv = (hm * hm * integral[s + 1] - hp * hp * integral[s - 1] +
                            (hp * hp - hm * hm) * integral[s]) /
                           (hm * hp * (hm + hp));
      const auto& mu = traj.states()[s];
      double rhs = 0.0;
      for (std::size_t i = 0; i < mu.size(); ++i) {
        tests[f].gradient(mu.position(i), g);
        const auto w = field.at(mu.position(i), traj.times()[s]);
        double dot = 0.0;
        for (int a = 0; a < d; ++a) dot += g[a] * w[a];
        rhs += mu.weight(i) * dot;
      }
      out[f] = std::max(out[f], std::abs(deriv - rhs));
    }
  }
  return out;
}

}  // namespace ctrans
