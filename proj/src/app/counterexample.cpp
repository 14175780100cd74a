#include "ctrans/app.hpp"

#include "ctrans/errors.hpp"
#include "ctrans/text.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace ctrans {

namespace {

// Quantile q of 1/2 U(-1, 0) + 1/2 U(1, 2).
double two_bump_quantile(double q) { return q < 0.5 ? -1.0 + 2.0 * q : 1.0 + 2.0 * (q - 0.5); }

// Integral over [0, span] of |du| / g(t) for a gap that moves linearly from g0 to g1.
double linear_gap_integral(double du, double g0, double g1, double span) {
  if (g0 <= 0.0 || g1 <= 0.0) return std::numeric_limits<double>::infinity();
  const double log_ratio = std::abs(g0 - g1) < 1e-15 * g0 ? 1.0 / g0 : std::log(g0 / g1) / (g0 - g1);
  return std::abs(du) * span * log_ratio;
}

bool strictly_increasing(const BvTable& t) {
  for (std::size_t k = 1; k < t.rows.size(); ++k)
    if (!(t.rows[k].integral > t.rows[k - 1].integral)) return false;
  return !t.rows.empty();
}

std::string config_hash(const nlohmann::json& config) { return hex64(fnv1a(config.dump())); }

void emit(const std::filesystem::path& out, const std::string& stem, nlohmann::json report, const std::string& csv,
          const Provenance& prov) {
  prov.stamp(report);
  write_text(out / (stem + ".json"), report.dump(2) + "\n");
  write_text(out / (stem + ".csv"), prov.comment_line() + csv);
}

}  // namespace

std::vector<MergeRow> bv_merge_geodesic(const std::vector<std::size_t>& counts) {
  std::vector<MergeRow> rows;
  for (std::size_t count : counts) {
    if (count < 2) throw InputError("bv-merge: need at least two particles");
    std::vector<double> a(count), b(count);
    for (std::size_t k = 0; k < count; ++k) {
      const double q = (static_cast<double>(k) + 0.5) / static_cast<double>(count);
      a[k] = two_bump_quantile(q);
      b[k] = -1.0 + 2.0 * q;
    }
    ControlProblem p;
    p.v = constant_field({0.0});
    p.omega = Region(Box{{-1.5}, {2.5}});
    p.mu0 = ParticleMeasure::uniform_weights(1, std::move(a));
    p.mu1 = ParticleMeasure::uniform_weights(1, std::move(b));
    p.delta = 1.0;
    p.snapshots_per_phase = 4;
    const ControllerResult r = exact_controller(p);
    const ParticleMeasure& start = r.trajectory.front();
    const ParticleMeasure& end = r.trajectory.back();
    const double span = r.trajectory.times().back() - r.trajectory.times().front();

    // Neighbours in the final order that started in different bumps.
    std::vector<std::size_t> order(end.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return end.coord(i, 0) < end.coord(j, 0); });
    MergeRow row;
    row.particles = count;
    row.final_gap = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < order.size(); ++k) {
      const std::size_t y = order[k], z = order[k + 1];
      if ((start.coord(y, 0) < 0.5) == (start.coord(z, 0) < 0.5)) continue;
      const double g1 = end.coord(z, 0) - end.coord(y, 0);
      if (g1 >= row.final_gap) continue;
      const double g0 = std::abs(start.coord(z, 0) - start.coord(y, 0));
      const double du = ((end.coord(z, 0) - start.coord(z, 0)) - (end.coord(y, 0) - start.coord(y, 0))) / span;
      row.final_gap = g1;
      row.integral = linear_gap_integral(du, g0, g1, span);
    }
    if (!std::isfinite(row.final_gap)) throw NumericalError("bv-merge: no pair from different bumps found");
    rows.push_back(row);
  }
  return rows;
}

ShearReport shear_counterexample(std::size_t particles, std::uint64_t seed) {
  const Box unit{{0.0, 0.0}, {1.0, 1.0}};
  const ParticleMeasure source = sample(DensitySpec::uniform_box(unit), particles, seed);
  const ParticleMeasure target = sample(DensitySpec::profile(unit, {0.8, 0.8}), particles, seed + 1);
  return shear_diagnostic(source, target, 2, 1.0, {0.2, 0.1, 0.05, 0.025, 0.0125});
}

int counterexample_command(const std::string& name, const CommandOptions& o, std::ostream& log) {
  if (name != "bv-merge" && name != "sqrt-split" && name != "shear")
    throw InputError("unknown counterexample '" + name + "' (expected bv-merge, sqrt-split or shear)");
  if (o.out.empty()) throw InputError("--out is required");
  const std::uint64_t seed = o.seed_override.value_or(1);

  if (name == "bv-merge") {
    const int levels = 20;
    const std::vector<std::size_t> counts{100, 200, 400, 800, 1600};
    const nlohmann::json config{{"counterexample", name}, {"levels", levels}, {"counts", counts}};
    const BvTable toy = bv_blowup_diagnostic(linear_merge_toy(1.0, levels), levels);
    const auto merge = bv_merge_geodesic(counts);
    nlohmann::json merge_j = nlohmann::json::array();
    std::string csv = "level,cutoff,time,integral,lower_bound\n";
    for (const auto& r : toy.rows)
      csv += std::to_string(r.level) + "," + format_double(r.cutoff) + "," + format_double(r.time) + "," +
             format_double(r.integral) + "," + format_double(r.level * std::log(2.0)) + "\n";
    bool merge_increasing = true;
    for (std::size_t k = 0; k < merge.size(); ++k) {
      merge_j.push_back({{"particles", merge[k].particles}, {"integral", merge[k].integral}, {"final_gap", merge[k].final_gap}});
      if (k > 0 && !(merge[k].integral > merge[k - 1].integral)) merge_increasing = false;
    }
    nlohmann::json report{{"config", config},
                          {"toy", toy.to_json()},
                          {"toy_strictly_increasing", strictly_increasing(toy)},
                          {"geodesic", merge_j},
                          {"geodesic_strictly_increasing", merge_increasing}};
    emit(o.out, "bv_merge", std::move(report), csv, Provenance(config_hash(config)));
    for (const auto& r : toy.rows) log << "2^-" << r.level << "  integral " << r.integral << "\n";
    for (const auto& r : merge) log << "N=" << r.particles << "  integral " << r.integral << "  gap " << r.final_gap << "\n";
    return 0;
  }

  if (name == "sqrt-split") {
    std::vector<std::size_t> counts{1000, 10000, 100000};
    if (o.particles) counts = {*o.particles};
    const nlohmann::json config{{"counterexample", name}, {"counts", counts}, {"seed", seed}, {"t", 1.0}};
    const auto rows = sqrt_split_study(counts, seed);
    nlohmann::json rows_j = nlohmann::json::array();
    std::string csv = "particles,w1_error\n";
    for (const auto& r : rows) {
      rows_j.push_back({{"particles", r.particles}, {"w1_error", r.w1_error}});
      csv += std::to_string(r.particles) + "," + format_double(r.w1_error) + "\n";
      log << "N=" << r.particles << "  W1 error " << r.w1_error << "\n";
    }
    emit(o.out, "sqrt_split", {{"config", config}, {"rows", rows_j}}, csv, Provenance(config_hash(config)));
    return 0;
  }

  const std::size_t particles = o.particles.value_or(20000);
  const nlohmann::json config{{"counterexample", name}, {"particles", particles}, {"seed", seed}};
  const ShearReport r = shear_counterexample(particles, seed);
  std::string csv = "width,jump,lipschitz\n";
  for (const auto& row : r.rows)
    csv += format_double(row.width) + "," + format_double(row.jump) + "," + format_double(row.lipschitz) + "\n";
  emit(o.out, "shear", {{"config", config}, {"report", r.to_json()}}, csv, Provenance(config_hash(config)));
  log << "velocity jump across the column wall: " << r.jump << "\n";
  for (const auto& row : r.rows) log << "width " << row.width << "  Lipschitz " << row.lipschitz << "\n";
  return 0;
}

}  // namespace ctrans
