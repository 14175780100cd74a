#include "ctrans/errors.hpp"
#include "ctrans/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ctrans {

nlohmann::json BvTable::to_json() const {
  nlohmann::json rows_j = nlohmann::json::array();
  for (const auto& r : rows)
    rows_j.push_back({{"level", r.level}, {"cutoff", r.cutoff}, {"time", r.time}, {"integral", r.integral}});
  return {{"rows", rows_j}, {"merged", merged}, {"note", note}};
}

BvTable bv_blowup_diagnostic(const PairPath& path, int max_level) {
  const std::size_t n = path.times.size();
  if (path.y.size() != n || path.z.size() != n || path.uy.size() != n || path.uz.size() != n)
    throw InputError("bv_blowup_diagnostic: pair path arrays differ in length");
  if (max_level < 1) throw InputError("bv_blowup_diagnostic: max_level must be at least 1");
  BvTable table;
  double acc = 0.0;
  int level = 1;
  auto integrand = [&](std::size_t k) { return std::abs(path.uy[k] - path.uz[k]) / std::abs(path.y[k] - path.z[k]); };
  for (std::size_t k = 0; k < n && level <= max_level; ++k) {
    const double gap = std::abs(path.y[k] - path.z[k]);
    if (gap == 0.0) break;  // the integrand is infinite from here on
    if (k > 0) acc += 0.5 * (path.times[k] - path.times[k - 1]) * (integrand(k) + integrand(k - 1));
    while (level <= max_level && gap <= std::ldexp(1.0, -level)) {
      table.rows.push_back({level, std::ldexp(1.0, -level), path.times[k], acc});
      ++level;
    }
  }
  table.merged = !table.rows.empty();
  if (!table.merged) table.note = "no merge detected";
  else if (level <= max_level)
    table.note = "pair did not get closer than 2^-" + std::to_string(level - 1) + " within the sampled times";
  return table;
}

PairPath pair_path(const Trajectory& traj, std::size_t y, std::size_t z,
                   const std::function<double(std::size_t, double, double)>& velocity) {
  if (traj.size() == 0 || traj.front().dim() != 1) throw InputError("pair_path: need a one-dimensional trajectory");
  if (y >= traj.front().size() || z >= traj.front().size()) throw InputError("pair_path: particle index out of range");
  PairPath p;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double t = traj.times()[k];
    const auto& s = traj.states()[k];
    p.times.push_back(t);
    p.y.push_back(s.coord(y, 0));
    p.z.push_back(s.coord(z, 0));
    p.uy.push_back(velocity(y, s.coord(y, 0), t));
    p.uz.push_back(velocity(z, s.coord(z, 0), t));
  }
  return p;
}

PairPath linear_merge_toy(double t1, int max_level, int per_octave) {
  if (!(t1 > 0.0) || max_level < 1 || per_octave < 1) throw InputError("linear_merge_toy: bad parameters");
  PairPath p;
  // Distance t1 - t shrinks geometrically on the grid.
  const int last = static_cast<int>(std::ceil((max_level + std::log2(t1)) * per_octave));
  for (int j = 0; j <= last; ++j) {
    const double gap = t1 * std::exp2(-static_cast<double>(j) / per_octave);
    p.times.push_back(t1 - gap);
    p.y.push_back(0.0);
    p.z.push_back(gap);
    p.uy.push_back(0.0);
    p.uz.push_back(-1.0);
  }
  return p;
}

namespace {

// Breakpoints splitting the weighted values into n groups of equal mass, with
// the ends pinned to lo and hi.
std::vector<double> quantile_walls(std::vector<std::pair<double, double>> vw, int n, double lo, double hi) {
  std::sort(vw.begin(), vw.end());
  double total = 0.0;
  for (const auto& [x, w] : vw) total += w;
  std::vector<double> walls{lo};
  double acc = 0.0;
  std::size_t k = 0;
  for (int i = 1; i < n; ++i) {
    const double target = total * i / n;
    while (k < vw.size() && acc + vw[k].second < target * (1.0 - 1e-12)) acc += vw[k++].second;
    walls.push_back(k < vw.size() ? vw[k].first : hi);
  }
  walls.push_back(hi);
  return walls;
}

struct NaiveGrid {
  std::vector<double> cols;               // n + 1 walls
  std::vector<std::vector<double>> rows;  // per column, n + 1 walls
};

NaiveGrid naive_grid(const ParticleMeasure& mu, int n) {
  NaiveGrid g;
  std::vector<std::pair<double, double>> xs;
  for (std::size_t i = 0; i < mu.size(); ++i) xs.emplace_back(mu.coord(i, 0), mu.weight(i));
  g.cols = quantile_walls(xs, n, 0.0, 1.0);
  for (int c = 0; c < n; ++c) {
    std::vector<std::pair<double, double>> ys;
    for (std::size_t i = 0; i < mu.size(); ++i) {
      const double x = mu.coord(i, 0);
      if (x >= g.cols[c] && (x < g.cols[c + 1] || c + 1 == n)) ys.emplace_back(mu.coord(i, 1), mu.weight(i));
    }
    g.rows.push_back(quantile_walls(ys, n, 0.0, 1.0));
  }
  return g;
}

// Vertical velocity of the naive field in column c at height y, time fraction s.
double naive_vertical(const NaiveGrid& a, const NaiveGrid& b, int c, double y, double s, double horizon) {
  const auto& ra = a.rows[c];
  const auto& rb = b.rows[c];
  const std::size_t n = ra.size() - 1;
  std::size_t j = 0;
  while (j + 1 < n && y > ra[j + 1] + s * (rb[j + 1] - ra[j + 1])) ++j;
  const double alo = ra[j], ahi = ra[j + 1], blo = rb[j], bhi = rb[j + 1];
  const double width = (ahi + s * (bhi - ahi)) - (alo + s * (blo - alo));
  const double alpha = ((bhi - ahi) - (blo - alo)) / (horizon * width);
  const double beta = (ahi * blo - alo * bhi) / (horizon * width);
  return alpha * y + beta;
}

}  // namespace

ShearReport shear_diagnostic(const ParticleMeasure& source, const ParticleMeasure& target, int n, double horizon,
                             const std::vector<double>& widths) {
  if (source.dim() != 2 || target.dim() != 2) throw InputError("shear_diagnostic: two-dimensional measures only");
  if (n < 2) throw InputError("shear_diagnostic: n must be at least 2");
  if (!(horizon > 0.0)) throw InputError("shear_diagnostic: horizon must be positive");
  const NaiveGrid a = naive_grid(source, n), b = naive_grid(target, n);
  ShearReport r;
  r.n = n;
  r.wall = a.cols[1] + 0.5 * (b.cols[1] - a.cols[1]);
  for (int step = 0; step <= 4; ++step) {
    const double s = step / 4.0;
    for (int c = 0; c + 1 < n; ++c)
      for (int q = 1; q < 200; ++q) {
        const double y = q / 200.0;
        r.jump = std::max(r.jump, std::abs(naive_vertical(a, b, c, y, s, horizon) -
                                           naive_vertical(a, b, c + 1, y, s, horizon)));
      }
  }
  for (double w : widths) {
    if (!(w > 0.0)) throw InputError("shear_diagnostic: widths must be positive");
    r.rows.push_back({w, r.jump, kSmoothstepSlope * r.jump / w});
  }
  return r;
}

nlohmann::json ShearReport::to_json() const {
  nlohmann::json rows_j = nlohmann::json::array();
  for (const auto& row : rows) rows_j.push_back({{"width", row.width}, {"jump", row.jump}, {"lipschitz", row.lipschitz}});
  return {{"n", n}, {"wall", wall}, {"jump", jump}, {"rows", rows_j}};
}

}  // namespace ctrans
