#include "ctrans/grid_control.hpp"

#include "ctrans/errors.hpp"
#include "ctrans/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace ctrans {

namespace {

constexpr double kDegenerate = 1e-14;

std::vector<GridControl::Lane> make_lanes(const std::vector<Interval>& a, const std::vector<Interval>& b) {
  std::vector<GridControl::Lane> out;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k].second - a[k].first <= kDegenerate || b[k].second - b[k].first <= kDegenerate) continue;
    out.push_back({a[k].first, a[k].second, b[k].first, b[k].second, static_cast<int>(k)});
  }
  return out;
}

double lo_at(const GridControl::Lane& l, double s) { return l.a_lo + s * (l.b_lo - l.a_lo); }
double hi_at(const GridControl::Lane& l, double s) { return l.a_hi + s * (l.b_hi - l.a_hi); }

void check_disjoint(const std::vector<GridControl::Lane>& lanes) {
  for (std::size_t k = 1; k < lanes.size(); ++k)
    for (double s : {0.0, 1.0})
      if (hi_at(lanes[k - 1], s) > lo_at(lanes[k], s))
        throw NumericalError("grid_control: overlapping moving cells");
}

}  // namespace

GridControl::GridControl(GridPartition source, GridPartition target, double horizon)
    : src_(std::move(source)), tgt_(std::move(target)), horizon_(horizon) {
  if (!(horizon > 0.0)) throw InputError("grid_control: horizon must be positive");
  if (src_.n != tgt_.n || src_.dim != tgt_.dim)
    throw InputError("grid_control: partitions differ in n or dimension");
  if (src_.n < 3) throw InputError("grid_control: n must be at least 3");
  cols_ = make_lanes(src_.inner_x, tgt_.inner_x);
  check_disjoint(cols_);
  if (dim() == 2) {
    for (const auto& c : cols_) {
      cells_.push_back(make_lanes(src_.inner_y[c.index], tgt_.inner_y[c.index]));
      check_disjoint(cells_.back());
    }
  }
  estimate_bounds();
}

double GridControl::lane_value(const Lane& l, double x, double s) const {
  const double width = hi_at(l, s) - lo_at(l, s);
  const double alpha = ((l.b_hi - l.a_hi) - (l.b_lo - l.a_lo)) / (horizon_ * width);
  const double beta = (l.a_hi * l.b_lo - l.a_lo * l.b_hi) / (horizon_ * width);
  return alpha * x + beta;
}

GridControl::Blend GridControl::locate(const std::vector<Lane>& lanes, double x, double s) const {
  Blend b;
  if (lanes.empty()) return b;
  // First lane whose lower wall lies above x.
  std::size_t lo = 0, hi = lanes.size();
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (lo_at(lanes[mid], s) > x) hi = mid;
    else lo = mid + 1;
  }
  const std::size_t k = lo;
  if (k == 0) {
    b.left = 0;
    return b;
  }
  const Lane& prev = lanes[k - 1];
  const double prev_hi = hi_at(prev, s);
  if (x <= prev_hi || k == lanes.size()) {
    b.left = static_cast<int>(k - 1);
    return b;
  }
  const double gap = lo_at(lanes[k], s) - prev_hi;
  b.left = static_cast<int>(k - 1);
  b.right = static_cast<int>(k);
  b.w = gap > 0.0 ? smoothstep((x - prev_hi) / gap) : 1.0;
  return b;
}

double GridControl::profile(const std::vector<Lane>& lanes, double x, double s) const {
  const Blend b = locate(lanes, x, s);
  if (b.left < 0) return 0.0;
  const double left = lane_value(lanes[b.left], x, s);
  if (b.right < 0) return left;
  return (1.0 - b.w) * left + b.w * lane_value(lanes[b.right], x, s);
}

void GridControl::velocity(std::span<const double> x, double t, std::span<double> out) const {
  const double s = std::clamp(t / horizon_, 0.0, 1.0);
  const Blend b = locate(cols_, x[0], s);
  if (b.left < 0) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  const double vl = lane_value(cols_[b.left], x[0], s);
  out[0] = b.right < 0 ? vl : (1.0 - b.w) * vl + b.w * lane_value(cols_[b.right], x[0], s);
  if (dim() == 1) return;
  const double yl = profile(cells_[b.left], x[1], s);
  out[1] = b.right < 0 ? yl : (1.0 - b.w) * yl + b.w * profile(cells_[b.right], x[1], s);
}

bool GridControl::cell_active(int i, int j) const {
  for (std::size_t c = 0; c < cols_.size(); ++c) {
    if (cols_[c].index != i) continue;
    if (dim() == 1) return true;
    for (const auto& l : cells_[c])
      if (l.index == j) return true;
  }
  return false;
}

Box GridControl::moving_cell(int i, int j, double t) const {
  const double s = std::clamp(t / horizon_, 0.0, 1.0);
  for (std::size_t c = 0; c < cols_.size(); ++c) {
    if (cols_[c].index != i) continue;
    Box b{{lo_at(cols_[c], s)}, {hi_at(cols_[c], s)}};
    if (dim() == 1) return b;
    for (const auto& l : cells_[c]) {
      if (l.index != j) continue;
      b.lo.push_back(lo_at(l, s));
      b.hi.push_back(hi_at(l, s));
      return b;
    }
  }
  return {};
}

double GridControl::min_denominator() const {
  double m = INFINITY;
  auto visit = [&](const std::vector<Lane>& ls) {
    for (const auto& l : ls) m = std::min({m, l.a_hi - l.a_lo, l.b_hi - l.b_lo});
  };
  visit(cols_);
  for (const auto& c : cells_) visit(c);
  return m;
}

void GridControl::estimate_bounds() {
  // Inside a lane the field is affine; across a gap it blends two affine
  // formulas, so |d/dx| <= max|alpha| + 1.875 * max|difference| / gap and
  // the extremes of |v| sit at lane walls or at the unit-box edges.
  double lip = 0.0, sup = 0.0;
  auto slope = [&](const Lane& l, double s) {
    return std::abs(((l.b_hi - l.a_hi) - (l.b_lo - l.a_lo)) / (horizon_ * (hi_at(l, s) - lo_at(l, s))));
  };
  auto lanes_bound = [&](const std::vector<Lane>& ls, double s, double& lip_out, double& sup_out) {
    for (std::size_t k = 0; k < ls.size(); ++k) {
      lip_out = std::max(lip_out, slope(ls[k], s));
      for (double x : {lo_at(ls[k], s), hi_at(ls[k], s)}) sup_out = std::max(sup_out, std::abs(lane_value(ls[k], x, s)));
      if (k + 1 < ls.size()) {
        const double a = hi_at(ls[k], s), b = lo_at(ls[k + 1], s);
        const double diff = std::max(std::abs(lane_value(ls[k], a, s) - lane_value(ls[k + 1], a, s)),
                                     std::abs(lane_value(ls[k], b, s) - lane_value(ls[k + 1], b, s)));
        if (b > a) lip_out = std::max(lip_out, slope(ls[k + 1], s) + kSmoothstepSlope * diff / (b - a));
      }
    }
    if (!ls.empty())
      for (double x : {0.0, 1.0})
        sup_out = std::max(sup_out, std::abs(profile(ls, x, s)));
  };
  for (int step = 0; step <= 8; ++step) {
    const double s = step / 8.0;
    double lx = 0.0, sx = 0.0, ly = 0.0, sy = 0.0, lyx = 0.0;
    lanes_bound(cols_, s, lx, sx);
    for (std::size_t c = 0; c < cells_.size(); ++c) {
      lanes_bound(cells_[c], s, ly, sy);
      if (c + 1 < cells_.size()) {
        const double gap = lo_at(cols_[c + 1], s) - hi_at(cols_[c], s);
        if (gap <= 0.0) continue;
        std::vector<double> ys;
        for (int q = 0; q <= 64; ++q) ys.push_back(q / 64.0);
        for (const auto* ls : {&cells_[c], &cells_[c + 1]})
          for (const auto& l : *ls) ys.insert(ys.end(), {lo_at(l, s), hi_at(l, s)});
        double diff = 0.0;
        for (double y : ys) diff = std::max(diff, std::abs(profile(cells_[c], y, s) - profile(cells_[c + 1], y, s)));
        lyx = std::max(lyx, kSmoothstepSlope * diff * 1.2 / gap);
      }
    }
    lip = std::max(lip, std::sqrt(lx * lx + ly * ly + lyx * lyx));
    sup = std::max(sup, std::sqrt(sx * sx + sy * sy));
  }
  lipschitz_ = 1.05 * lip;
  sup_ = sup;
}

TimeField GridControl::field() const {
  FieldMeta m;
  m.lipschitz = lipschitz_;
  m.sup_bound = sup_;
  m.autonomous = false;
  m.t_begin = 0.0;
  m.t_end = horizon_;
  m.descriptor = to_json();
  auto self = std::make_shared<const GridControl>(*this);
  return TimeField(dim(), [self](std::span<const double> x, double t, std::span<double> out) {
    self->velocity(x, t, out);
  }, m);
}

nlohmann::json GridControl::to_json() const {
  return {{"kind", "grid"}, {"horizon", horizon_}, {"source", src_.to_json()}, {"target", tgt_.to_json()}};
}

GridControl GridControl::from_json(const nlohmann::json& j) {
  try {
    return GridControl(GridPartition::from_json(j.at("source")), GridPartition::from_json(j.at("target")),
                       j.at("horizon").get<double>());
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("grid descriptor: ") + e.what());
  }
}

}  // namespace ctrans
