#pragma once

#include "ctrans/measure.hpp"

#include <json.hpp>

#include <string>
#include <utility>
#include <vector>

namespace ctrans {

using Interval = std::pair<double, double>;

// Quantile mesh of a measure supported in the unit box. In two dimensions the
// columns split x_1 into n strips of mass 1/n and every column splits x_2 into
// n cells of mass 1/n^2; the inner bounds cut off side strips so that every
// inner cell carries mass (n-2)^2/n^4. In one dimension only the columns exist
// and inner intervals carry (n-2)/n^2.
struct GridPartition {
  int n = 0;
  int dim = 2;
  std::vector<double> outer_x;                   // a_0 .. a_n
  std::vector<std::vector<double>> outer_y;      // per column: a_{i,0} .. a_{i,n}
  std::vector<Interval> inner_x;                 // per column: (a_i^-, a_i^+)
  std::vector<std::vector<Interval>> inner_y;    // per cell: (a_ij^-, a_ij^+)
  std::vector<std::string> warnings;

  bool in_inner_cell(std::span<const double> x, int i, int j) const;
  // Index (i, j) of the inner cell containing x, or (-1, -1).
  std::pair<int, int> locate_inner(std::span<const double> x) const;

  nlohmann::json to_json() const;
  static GridPartition from_json(const nlohmann::json& j);
};

// Target mass of an inner cell relative to the total.
double inner_cell_fraction(int n, int dim);

GridPartition partition_measure(const ParticleMeasure& mu, int n);

std::pair<GridPartition, GridPartition> quantile_partition(const ParticleMeasure& src,
                                                           const ParticleMeasure& tgt, int n);

// Upper bound on W1(mu(T), mu1) for the grid construction in the unit box.
double grid_error_bound(int n, int dim = 2);

}  // namespace ctrans
