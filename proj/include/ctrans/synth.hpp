#pragma once

#include "ctrans/field.hpp"
#include "ctrans/geometry.hpp"
#include "ctrans/grid_control.hpp"
#include "ctrans/measure.hpp"
#include "ctrans/ot.hpp"
#include "ctrans/schedule.hpp"
#include "ctrans/trajectory.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ctrans {

// ---- storage ---------------------------------------------------------------

struct StorageControl {
  TimeField control;  // (theta - 1) v
  TimeField total;    // theta v
  double k = 0.0;
  double floor = 0.0;  // speed factor left deep inside the region
};

// theta = 1 - (1 - floor) * smoothstep(k * depth). With floor = 0 the total
// field vanishes identically where the depth in omega0 reaches 1/k.
StorageControl storage_control(const TimeField& v, const Region& omega0, double k, double floor = 0.0);

// ---- funnel ----------------------------------------------------------------

struct FunnelControl {
  TimeField control;
  TimeField total;
  double k = 0.0;
};

// total = v + chi (k grad eta - v), where chi is 1 on omega1 and tapers to 0
// over a band of width `taper` outside it.
FunnelControl funnel_field(const TimeField& v, const Region& omega1, const EtaResult& eta, double k,
                           double taper);

struct FunnelOptions {
  double tol = 1e-6;
  double taper = 0.0;  // 0: no band, the control is cut at the boundary of omega1
  double k_cap = 1048576.0;
  // Also require every particle to sit inside s0 at time delta when the flow
  // is not stopped.
  bool inside_at_end = false;
};

struct FunnelResult {
  FunnelControl field;
  EtaResult eta;
  double k_used = 0.0;
  std::vector<double> hit_times;  // stopped convention, elapsed from 0
  std::size_t escalations = 0;
};

// Doubles k until every particle of mu reaches s0 strictly before delta.
// Escalation starts at the largest power of two that the speed bound k*kappa1
// cannot rule out, which gives the same k as doubling from 1.
FunnelResult funnel_control(const TimeField& v, const Region& omega1, const Region& s0, double delta,
                            const ParticleMeasure& mu, const FunnelOptions& opts = {});

// ---- geodesic --------------------------------------------------------------

struct GeodesicResult {
  Trajectory trajectory;
  TransportPlan plan;
  // One particle per plan entry: start, end and the constant velocity.
  ParticleMeasure start;
  ParticleMeasure end;
  std::vector<double> velocities;  // row-major, (end - start) / delta
  double w2 = 0.0;
};

// Displacement interpolation along an optimal W2 plan, sampled at `snapshots`
// uniform times in [0, delta]. Rejects a region s that is not a single box or
// ball, or supports outside s.
GeodesicResult geodesic_transport(const ParticleMeasure& mu0, const ParticleMeasure& mu1, double delta,
                                  const Region& s, std::size_t snapshots = 9);

// ---- controllers -----------------------------------------------------------

struct ControlProblem {
  TimeField v;  // autonomous
  Region omega;
  ParticleMeasure mu0;
  ParticleMeasure mu1;
  double delta = 0.0;
  double epsilon = 0.05;
  double tol = 1e-6;
  double horizon = 50.0;          // search horizon for the geometric condition
  std::optional<double> margin;   // default 0.1 * inradius(omega)
  std::optional<int> n;           // grid resolution; chosen from epsilon otherwise
  std::uint64_t seed = 1;
  std::size_t snapshots_per_phase = 6;
};

struct ControllerResult {
  ControlSchedule schedule;
  Trajectory trajectory;
  nlohmann::json report;
  double final_w1 = 0.0;
};

ControllerResult approx_controller(const ControlProblem& problem);
ControllerResult exact_controller(const ControlProblem& problem);

// Smallest n >= 3 whose grid bound is at most target, or nullopt past n_cap.
std::optional<int> grid_resolution_for(double target, int dim, int n_cap = 64);

// Edge of an axis-aligned cube strictly containing both supports.
double enclosing_cube_edge(const ParticleMeasure& a, const ParticleMeasure& b);

// Rebuilds the fields of one entry of ControlSchedule::to_json()["segments"].
// Witness segments (stopped flows, geodesics) have no spatial field to rebuild.
Segment rebuild_segment(const nlohmann::json& segment, const TimeField& v);

// ---- diagnostics -----------------------------------------------------------

struct BvRow {
  int level = 0;          // cutoff distance 2^-level
  double cutoff = 0.0;
  double time = 0.0;      // first snapshot time at which the pair is that close
  double integral = 0.0;  // accumulated |u(y) - u(z)| / |y - z| dt up to that time
};

struct BvTable {
  std::vector<BvRow> rows;
  bool merged = false;
  std::string note;
  nlohmann::json to_json() const;
};

// Positions of a particle pair and their velocities at increasing times.
struct PairPath {
  std::vector<double> times;
  std::vector<double> y, z;    // one-dimensional positions
  std::vector<double> uy, uz;  // velocities
};

// Trapezoidal accumulation of the lower-bound integrand along the pair,
// recorded the first time the pair gets within 2^-level, level = 1..max_level.
BvTable bv_blowup_diagnostic(const PairPath& path, int max_level);

// Pair path from a one-dimensional trajectory and a velocity witness.
PairPath pair_path(const Trajectory& traj, std::size_t y, std::size_t z,
                   const std::function<double(std::size_t particle, double x, double t)>& velocity);

// y = 0 at rest, z approaches it at unit speed and merges at t1. Times are
// graded geometrically towards t1 so each halving of the distance gets
// `per_octave` steps.
PairPath linear_merge_toy(double t1, int max_level, int per_octave = 16);

struct ShearRow {
  double width = 0.0;
  double jump = 0.0;
  double lipschitz = 0.0;
};

struct ShearReport {
  int n = 2;
  double wall = 0.0;   // x position of the shared column wall at the sampled time
  double jump = 0.0;   // largest mismatch of the naive vertical velocity across it
  std::vector<ShearRow> rows;
  nlohmann::json to_json() const;
};

// Naive cell-to-cell field mapping every full cell A_ij onto B_ij, evaluated
// on both sides of an interior column wall; smoothing the jump over a band of
// width w costs a Lipschitz constant of about 1.875 * jump / w.
ShearReport shear_diagnostic(const ParticleMeasure& source, const ParticleMeasure& target, int n,
                             double horizon, const std::vector<double>& widths);

}  // namespace ctrans
