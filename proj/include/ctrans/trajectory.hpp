#pragma once

#include "ctrans/field.hpp"
#include "ctrans/measure.hpp"
#include "ctrans/measure_io.hpp"

#include <json.hpp>

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace ctrans {

// Measure snapshots along t -> mu(t). Particle count and total mass are the
// same in every state.
class Trajectory {
 public:
  Trajectory() = default;
  Trajectory(double t, ParticleMeasure state);

  // Times must increase; the state must match the first in size and mass.
  void append(double t, ParticleMeasure state);
  // Appends another trajectory whose first time equals back(); its first
  // state replaces nothing and is skipped.
  void extend(const Trajectory& next);

  const std::vector<double>& times() const { return times_; }
  const std::vector<ParticleMeasure>& states() const { return states_; }
  std::size_t size() const { return times_.size(); }
  const ParticleMeasure& front() const { return states_.front(); }
  const ParticleMeasure& back() const { return states_.back(); }

  nlohmann::json field_descriptor = nlohmann::json::object();
  double tol = 0.0;

 private:
  std::vector<double> times_;
  std::vector<ParticleMeasure> states_;
};

// Advects mu through the given increasing times, starting at times.front().
Trajectory simulate(const TimeField& field, const ParticleMeasure& mu,
                    const std::vector<double>& times, double tol);

// Uniform time grid with the given number of intervals.
std::vector<double> time_grid(double t0, double t1, std::size_t intervals);

// snapshot_NNNN.csv per time plus manifest.json.
void write_trajectory(const std::filesystem::path& dir, const Trajectory& traj, const Provenance& prov);

struct TestFunction {
  std::string name;
  std::function<double(std::span<const double>)> value;
  std::function<void(std::span<const double>, std::span<double>)> gradient;
};

// exp(-1 / (1 - r^2)) with r = |x - center| / radius, zero for r >= 1.
TestFunction bump_test_function(std::vector<double> center, double radius);

// For each test function, the largest |d/dt <psi, mu> - <grad psi . w, mu>|
// over interior snapshots; the time derivative is the three-point central
// difference (second order on non-uniform grids too).
std::vector<double> weak_residual(const Trajectory& traj, const TimeField& field,
                                  const std::vector<TestFunction>& tests);

}  // namespace ctrans
