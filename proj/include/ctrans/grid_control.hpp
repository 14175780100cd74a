#pragma once

#include "ctrans/field.hpp"
#include "ctrans/partition.hpp"

#include <json.hpp>

#include <vector>

namespace ctrans {

// Piecewise-affine field in the unit box that slides every inner source cell
// onto the paired inner target cell over [0, horizon]. Cell walls move on
// straight lines c(t) = a + (t/T)(b - a), so inside a moving cell the
// velocity is the affine map fixed by its two walls. Between neighbouring
// cells the two affine formulas are blended with a smoothstep, which keeps
// the field C^2 in space; beyond the outermost cells the edge formula is
// extended. Cells that are degenerate in the source or the target are left
// out of the construction.
class GridControl {
 public:
  GridControl(GridPartition source, GridPartition target, double horizon);

  int dim() const { return src_.dim; }
  int n() const { return src_.n; }
  double horizon() const { return horizon_; }
  const GridPartition& source() const { return src_; }
  const GridPartition& target() const { return tgt_; }

  void velocity(std::span<const double> x, double t, std::span<double> out) const;
  // Moving inner cell (i, j) at time t in the unit box; empty lo/hi when the
  // cell was left out.
  Box moving_cell(int i, int j, double t) const;
  bool cell_active(int i, int j) const;

  // Smallest wall separation over time; bounded below by the smaller of the
  // source and target widths because walls move linearly.
  double min_denominator() const;
  double lipschitz() const { return lipschitz_; }
  double sup_bound() const { return sup_; }

  TimeField field() const;
  nlohmann::json to_json() const;
  static GridControl from_json(const nlohmann::json& j);

  struct Lane {
    double a_lo, a_hi, b_lo, b_hi;
    int index;  // position in the partition
  };

 private:
  struct Blend {
    int left = -1, right = -1;  // lane indices; right < 0 when not blending
    double w = 0.0;              // weight of the right lane
  };
  Blend locate(const std::vector<Lane>& lanes, double x, double s) const;
  double lane_value(const Lane& l, double x, double s) const;
  double profile(const std::vector<Lane>& lanes, double x, double s) const;
  void estimate_bounds();

  GridPartition src_, tgt_;
  double horizon_ = 1.0;
  std::vector<Lane> cols_;
  std::vector<std::vector<Lane>> cells_;  // per active column
  double lipschitz_ = 0.0;
  double sup_ = 0.0;
};

}  // namespace ctrans
