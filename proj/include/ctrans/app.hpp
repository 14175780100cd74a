#pragma once

#include "ctrans/density.hpp"
#include "ctrans/field.hpp"
#include "ctrans/measure.hpp"
#include "ctrans/measure_io.hpp"
#include "ctrans/region.hpp"
#include "ctrans/synth.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ctrans {

// Velocity descriptors:
//   {"kind": "constant", "value": [..]}
//   {"kind": "affine", "matrix": [[..], ..], "offset": [..]}
//   {"kind": "radial", "center": [..], "rate": r}          v = r (x - center)
//   {"kind": "preset", "name": "figure1", "amplitude": a, "center": [c1, c2]}
//       v = (1, a tanh(x1 - c1) tanh(x2 - c2))
TimeField field_from_descriptor(const nlohmann::json& j, int dim);

// A measure given either as a density or as explicit atoms
// {"atoms": [[..], ..], "weights": [..]}; weights default to 1/count.
struct MeasureSource {
  std::optional<DensitySpec> density;
  std::optional<ParticleMeasure> atoms;

  nlohmann::json to_json() const;
  static MeasureSource from_json(const nlohmann::json& j, int dim, const std::string& where);
  ParticleMeasure realize(std::size_t count, std::uint64_t seed) const;
  Box support_bbox() const;
};

struct ScenarioParams {
  std::optional<int> n;
  double epsilon = 0.05;
  double delta = 0.0;  // required
  std::size_t particles = 2000;
  std::uint64_t seed = 1;
  double horizon = 50.0;
  double tol = 1e-6;
  std::optional<double> margin;
  std::size_t snapshots = 6;
};

struct Scenario {
  std::string name = "scenario";
  int dim = 2;
  nlohmann::json v;
  Region omega;
  MeasureSource mu0, mu1;
  ScenarioParams params;
  std::vector<std::string> defaults_applied;  // parameters filled in by the parser

  // Canonical form with every default written out.
  nlohmann::json to_json() const;
  static Scenario from_json(const nlohmann::json& j);
  // Parse errors carry the line and column; field errors the field path.
  static Scenario load(const std::filesystem::path& path);
  std::string hash() const;

  TimeField velocity() const;
  // mu0 uses seed, mu1 uses seed + 1.
  ParticleMeasure sample_mu0() const;
  ParticleMeasure sample_mu1() const;
  ControlProblem problem() const;

  bool operator==(const Scenario& other) const { return to_json() == other.to_json(); }
};

// ---- experiments -------------------------------------------------------------

struct StudyRow {
  int n = 0;
  double measured_w1 = 0.0;
  double paper_bound = 0.0;
  double sample_error = 0.0;
};

// Grid control alone on the two measures mapped into the unit box, horizon 1.
// Distances are in unit-box coordinates on subsamples of at most 2000 points;
// sample_error is the same distance between two independent samplings of mu1.
std::vector<StudyRow> convergence_study(const Scenario& s, const std::vector<int>& n_list);
std::string study_csv(const std::vector<StudyRow>& rows, const Provenance& prov);

struct SqrtSplitRow {
  std::size_t particles = 0;
  double w1_error = 0.0;
};
// Stratified uniform(-1, 1) advected by the square-root field to time t,
// against the closed-form law at the same particle count.
std::vector<SqrtSplitRow> sqrt_split_study(const std::vector<std::size_t>& counts, std::uint64_t seed, double t = 1.0);

struct MergeRow {
  std::size_t particles = 0;
  double integral = 0.0;
  double final_gap = 0.0;
};
// Exact controller on the two-bump -> one-bump pair; the integral is taken
// along the closest pair that comes from different bumps.
std::vector<MergeRow> bv_merge_geodesic(const std::vector<std::size_t>& counts);

ShearReport shear_counterexample(std::size_t particles, std::uint64_t seed);

// ---- commands ----------------------------------------------------------------

struct CommandOptions {
  std::filesystem::path scenario;
  std::filesystem::path out;
  std::string mode = "approx";
  std::vector<int> n_list;
  std::optional<std::uint64_t> seed_override;
  std::optional<std::size_t> particles;
};

// Each returns the process exit code: 0 success, 1 input error, 2 geometric
// condition failure.
int run_command(const CommandOptions& o, std::ostream& log);
int check_command(const CommandOptions& o, std::ostream& log);
int study_command(const CommandOptions& o, std::ostream& log);
int counterexample_command(const std::string& name, const CommandOptions& o, std::ostream& log);

}  // namespace ctrans
