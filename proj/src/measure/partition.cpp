#include "ctrans/partition.hpp"

#include "ctrans/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ctrans {

namespace {

// Relative slack when comparing running sums with quantile targets, so that
// 1/n accumulated from n equal weights counts as reaching 1/n.
constexpr double kSlack = 1e-12;

std::vector<std::size_t> sorted_by(const ParticleMeasure& mu, std::span<const std::size_t> idx,
                                   int axis) {
  std::vector<std::size_t> out(idx.begin(), idx.end());
  std::sort(out.begin(), out.end(), [&](std::size_t a, std::size_t b) {
    const double xa = mu.coord(a, axis), xb = mu.coord(b, axis);
    return xa < xb || (xa == xb && a < b);
  });
  return out;
}

// Splits an ordered run into `parts` consecutive groups of (nearly) equal mass.
// Returns group end offsets (exclusive), one per group. A group ends at the
// particle where the running sum first reaches its target.
std::vector<std::size_t> split_equal(const ParticleMeasure& mu, std::span<const std::size_t> run,
                                     int parts, double total) {
  std::vector<std::size_t> ends;
  double cum = 0.0;
  std::size_t pos = 0;
  for (int k = 1; k < parts; ++k) {
    const double target = total * k / parts;
    while (pos < run.size() && cum < target - kSlack * total) cum += mu.weight(run[pos++]);
    ends.push_back(pos);
  }
  ends.push_back(run.size());
  return ends;
}

// Position of the particle at which the running sum from the front first
// reaches `mass`; returns the offset of that particle or run.size().
std::size_t crossing_from_front(const ParticleMeasure& mu, std::span<const std::size_t> run,
                                double mass, double total) {
  double cum = 0.0;
  for (std::size_t p = 0; p < run.size(); ++p) {
    cum += mu.weight(run[p]);
    if (cum >= mass - kSlack * total) return p;
  }
  return run.size();
}

std::size_t crossing_from_back(const ParticleMeasure& mu, std::span<const std::size_t> run,
                               double mass, double total) {
  double cum = 0.0;
  for (std::size_t p = run.size(); p-- > 0;) {
    cum += mu.weight(run[p]);
    if (cum >= mass - kSlack * total) return p;
  }
  return run.size();
}

double mass_of(const ParticleMeasure& mu, std::span<const std::size_t> run) {
  double m = 0.0;
  for (std::size_t i : run) m += mu.weight(i);
  return m;
}

// Inner interval of an ordered run after removing `side_lo` mass from the
// front and `side_hi` from the back. Degenerate runs collapse to a point.
Interval inner_bounds(const ParticleMeasure& mu, std::span<const std::size_t> run, int axis,
                      double side_lo, double side_hi, double lo_default, double hi_default,
                      double total) {
  if (run.empty()) {
    const double mid = 0.5 * (lo_default + hi_default);
    return {mid, mid};
  }
  double lo = lo_default, hi = hi_default;
  if (side_lo > kSlack * total) {
    const std::size_t p = crossing_from_front(mu, run, side_lo, total);
    lo = p < run.size() ? mu.coord(run[p], axis) : hi_default;
  }
  if (side_hi > kSlack * total) {
    const std::size_t p = crossing_from_back(mu, run, side_hi, total);
    hi = p < run.size() ? mu.coord(run[p], axis) : lo_default;
  }
  if (!(lo < hi)) {
    const double mid = 0.5 * (lo + hi);
    return {mid, mid};
  }
  return {lo, hi};
}

int locate_interval(const std::vector<Interval>& cells, double x) {
  auto it = std::upper_bound(cells.begin(), cells.end(), x,
                             [](double v, const Interval& c) { return v < c.first; });
  if (it == cells.begin()) return -1;
  --it;
  if (x > it->first && x < it->second) return static_cast<int>(it - cells.begin());
  return -1;
}

}  // namespace

double inner_cell_fraction(int n, int dim) {
  const double m = static_cast<double>(n - 2);
  if (dim == 1) return m / (static_cast<double>(n) * n);
  return m * m / std::pow(static_cast<double>(n), 4);
}

double grid_error_bound(int n, int dim) {
  const double nn = static_cast<double>(n);
  if (dim == 1) return (nn - 2.0) / (nn * nn) + 4.0 / nn;
  return 2.0 * (nn - 2.0) * (nn - 2.0) / (nn * nn * nn) + 8.0 * (nn - 1.0) / (nn * nn);
}

bool GridPartition::in_inner_cell(std::span<const double> x, int i, int j) const {
  const auto& ix = inner_x[i];
  if (!(x[0] > ix.first && x[0] < ix.second)) return false;
  if (dim == 1) return true;
  const auto& iy = inner_y[i][j];
  return x[1] > iy.first && x[1] < iy.second;
}

std::pair<int, int> GridPartition::locate_inner(std::span<const double> x) const {
  const int i = locate_interval(inner_x, x[0]);
  if (i < 0) return {-1, -1};
  if (dim == 1) return {i, 0};
  const int j = locate_interval(inner_y[i], x[1]);
  if (j < 0) return {-1, -1};
  return {i, j};
}

GridPartition partition_measure(const ParticleMeasure& mu, int n) {
  if (n < 3) throw InputError("quantile_partition: n must be at least 3 (inner cells vanish for n <= 2)");
  if (mu.dim() != 1 && mu.dim() != 2)
    throw InputError("quantile_partition: only dimensions 1 and 2 are supported");
  if (mu.is_empty()) throw InputError("quantile_partition: empty measure");
  const int d = mu.dim();
  const Box bb = mu.support_bbox();
  for (int a = 0; a < d; ++a) {
    if (bb.lo[a] < 0.0 || bb.hi[a] > 1.0)
      throw InputError("quantile_partition: measure must be supported in the unit box; rescale first");
  }

  GridPartition g;
  g.n = n;
  g.dim = d;
  const double total = mu.total_mass();
  const double nn = static_cast<double>(n);
  const double atom_limit = d == 2 ? total / (nn * nn * nn) : total / (nn * nn);
  if (mu.max_weight() > atom_limit)
    g.warnings.push_back("atom heavier than the margin mass; quantile ties broken by position order");

  std::vector<std::size_t> all(mu.size());
  std::iota(all.begin(), all.end(), 0);
  const auto by_x = sorted_by(mu, all, 0);
  const auto col_end = split_equal(mu, by_x, n, total);

  g.outer_x.assign(n + 1, 0.0);
  for (int i = 1; i < n; ++i) {
    const std::size_t e = col_end[i - 1];
    g.outer_x[i] = e > 0 ? mu.coord(by_x[e - 1], 0) : 0.0;
  }
  g.outer_x[n] = mu.coord(by_x.back(), 0);

  const double side_x = total / (nn * nn);
  const double inner_target = total * inner_cell_fraction(n, d);
  g.inner_x.resize(n);
  if (d == 2) {
    g.outer_y.resize(n);
    g.inner_y.resize(n);
  }

  std::size_t begin = 0;
  for (int i = 0; i < n; ++i) {
    const std::size_t end = col_end[i];
    std::span<const std::size_t> column(by_x.data() + begin, end - begin);
    begin = end;
    g.inner_x[i] = inner_bounds(mu, column, 0, side_x, side_x, g.outer_x[i], g.outer_x[i + 1], total);
    if (column.empty()) g.warnings.push_back("column " + std::to_string(i) + " is empty");
    if (d == 1) continue;

    const double col_mass = mass_of(mu, column);
    const auto by_y = sorted_by(mu, column, 1);
    auto& oy = g.outer_y[i];
    oy.assign(n + 1, 0.0);
    g.inner_y[i].resize(n);
    const auto cell_end = split_equal(mu, by_y, n, col_mass);
    for (int j = 1; j < n; ++j) {
      const std::size_t e = cell_end[j - 1];
      oy[j] = e > 0 ? mu.coord(by_y[e - 1], 1) : 0.0;
    }
    oy[n] = by_y.empty() ? 0.0 : mu.coord(by_y.back(), 1);

    const auto [ix_lo, ix_hi] = g.inner_x[i];
    std::size_t cb = 0;
    for (int j = 0; j < n; ++j) {
      const std::size_t ce = cell_end[j];
      std::vector<std::size_t> inner;
      for (std::size_t p = cb; p < ce; ++p) {
        const double x1 = mu.coord(by_y[p], 0);
        if (x1 > ix_lo && x1 < ix_hi) inner.push_back(by_y[p]);
      }
      cb = ce;
      // Equal side strips leave every inner cell with the common target mass,
      // which is what lets source and target cells be paired one to one.
      const double side = 0.5 * (mass_of(mu, inner) - inner_target);
      if (side < 0.0 && !inner.empty())
        g.warnings.push_back("cell (" + std::to_string(i) + "," + std::to_string(j) +
                             ") carries less than the inner target mass");
      g.inner_y[i][j] = inner_bounds(mu, inner, 1, std::max(side, 0.0), std::max(side, 0.0),
                                     oy[j], oy[j + 1], total);
    }
  }
  return g;
}

std::pair<GridPartition, GridPartition> quantile_partition(const ParticleMeasure& src,
                                                           const ParticleMeasure& tgt, int n) {
  if (src.dim() != tgt.dim()) throw InputError("quantile_partition: dimension mismatch");
  return {partition_measure(src, n), partition_measure(tgt, n)};
}

nlohmann::json GridPartition::to_json() const {
  auto pairs = [](const std::vector<Interval>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& [lo, hi] : v) a.push_back({lo, hi});
    return a;
  };
  nlohmann::json j{{"n", n}, {"dim", dim}, {"outer_x", outer_x}, {"inner_x", pairs(inner_x)}};
  if (dim == 2) {
    j["outer_y"] = outer_y;
    nlohmann::json iy = nlohmann::json::array();
    for (const auto& col : inner_y) iy.push_back(pairs(col));
    j["inner_y"] = iy;
  }
  return j;
}

GridPartition GridPartition::from_json(const nlohmann::json& j) {
  auto pairs = [](const nlohmann::json& a) {
    std::vector<Interval> v;
    for (const auto& p : a) v.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    return v;
  };
  GridPartition g;
  try {
    g.n = j.at("n").get<int>();
    g.dim = j.at("dim").get<int>();
    g.outer_x = j.at("outer_x").get<std::vector<double>>();
    g.inner_x = pairs(j.at("inner_x"));
    if (g.dim == 2) {
      g.outer_y = j.at("outer_y").get<std::vector<std::vector<double>>>();
      for (const auto& col : j.at("inner_y")) g.inner_y.push_back(pairs(col));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("grid partition: ") + e.what());
  }
  return g;
}

}  // namespace ctrans
