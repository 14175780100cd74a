#include "ctrans/app.hpp"

#include "ctrans/errors.hpp"
#include "ctrans/grid_control.hpp"
#include "ctrans/integrate.hpp"
#include "ctrans/oracle.hpp"
#include "ctrans/ot.hpp"
#include "ctrans/partition.hpp"
#include "ctrans/text.hpp"

#include <algorithm>
#include <ostream>

namespace ctrans {

namespace {

constexpr std::size_t kW1Cap = 2000;

// Joint bounding box scaled isotropically onto the unit box.
struct UnitMap {
  std::vector<double> lo;
  double extent = 1.0;

  ParticleMeasure apply(const ParticleMeasure& mu) const {
    std::vector<double> pos = mu.positions();
    const std::size_t d = lo.size();
    for (std::size_t k = 0; k < pos.size(); ++k) pos[k] = (pos[k] - lo[k % d]) / extent;
    return mu.with_positions(std::move(pos));
  }
};

UnitMap unit_map(const Box& a, const Box& b) {
  UnitMap m;
  m.extent = 0.0;
  for (std::size_t i = 0; i < a.lo.size(); ++i) {
    const double lo = std::min(a.lo[i], b.lo[i]), hi = std::max(a.hi[i], b.hi[i]);
    m.lo.push_back(lo);
    m.extent = std::max(m.extent, hi - lo);
  }
  if (!(m.extent > 0.0)) throw InputError("study: supports have no extent");
  return m;
}

}  // namespace

std::vector<StudyRow> convergence_study(const Scenario& s, const std::vector<int>& n_list) {
  if (n_list.empty()) throw InputError("study: empty n list");
  const UnitMap map = unit_map(s.mu0.support_bbox(), s.mu1.support_bbox());
  const ParticleMeasure mu0 = map.apply(s.sample_mu0());
  const ParticleMeasure mu1 = map.apply(s.sample_mu1());
  const ParticleMeasure mu1_again = map.apply(s.mu1.realize(s.params.particles, s.params.seed + 2));
  check_equal_mass(mu0, mu1, "convergence_study");
  const double sample_error = w1_subsampled(mu1, mu1_again, kW1Cap, s.params.seed);

  std::vector<StudyRow> rows;
  for (int n : n_list) {
    if (n < 3) throw InputError("study: every n must be at least 3");
    auto [src, tgt] = quantile_partition(mu0, mu1, n);
    const GridControl grid(std::move(src), std::move(tgt), 1.0);
    const ParticleMeasure end = flow_push(grid.field(), mu0, 0.0, 1.0, s.params.tol);
    rows.push_back({n, w1_subsampled(end, mu1, kW1Cap, s.params.seed), grid_error_bound(n, s.dim), sample_error});
  }
  return rows;
}

std::string study_csv(const std::vector<StudyRow>& rows, const Provenance& prov) {
  std::string out = prov.comment_line() + "n,measured_w1,paper_bound,sample_error\n";
  for (const auto& r : rows)
    out += std::to_string(r.n) + "," + format_double(r.measured_w1) + "," + format_double(r.paper_bound) + "," +
           format_double(r.sample_error) + "\n";
  return out;
}

std::vector<SqrtSplitRow> sqrt_split_study(const std::vector<std::size_t>& counts, std::uint64_t seed, double t) {
  const DensitySpec law = DensitySpec::uniform_box(Box{{-1.0}, {1.0}});
  const TimeField field = sqrt_field();
  std::vector<SqrtSplitRow> rows;
  for (std::size_t count : counts) {
    if (count == 0) throw InputError("sqrt-split: particle counts must be positive");
    const ParticleMeasure start = sample_stratified(law, count, seed);
    const ParticleMeasure end = flow_push(field, start, 0.0, t, 1e-10);
    std::vector<double> exact(count);
    for (std::size_t k = 0; k < count; ++k)
      exact[k] = oracle::sqrt_field_solution(t, (static_cast<double>(k) + 0.5) / static_cast<double>(count));
    const ParticleMeasure reference = ParticleMeasure::uniform_weights(1, std::move(exact), start.total_mass());
    rows.push_back({count, w1_1d(end, reference)});
  }
  return rows;
}

int study_command(const CommandOptions& o, std::ostream& log) {
  if (o.scenario.empty()) throw InputError("--scenario is required");
  if (o.out.empty()) throw InputError("--out is required");
  Scenario s = Scenario::load(o.scenario);
  if (o.seed_override) s.params.seed = *o.seed_override;
  if (o.particles) s.params.particles = *o.particles;
  std::vector<int> n_list = o.n_list;
  if (n_list.empty()) {
    n_list = {4, 8, 16};
    log << "no --n-list given; using 4,8,16\n";
  }
  const auto rows = convergence_study(s, n_list);
  const Provenance prov(s.hash());
  write_text(o.out / "study.csv", study_csv(rows, prov));
  for (const auto& r : rows)
    log << "n=" << r.n << "  W1=" << r.measured_w1 << "  bound=" << r.paper_bound << "  sample=" << r.sample_error
        << "\n";
  return 0;
}

}  // namespace ctrans
