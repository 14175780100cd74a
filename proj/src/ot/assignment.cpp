#include "ctrans/errors.hpp"
#include "ctrans/ot.hpp"

#include <limits>

namespace ctrans {

// Shortest augmenting path (Hungarian with potentials), O(n^3). Arrays carry
// a dummy column 0; the column scan in the inner loop is the hot spot and
// runs through the dispatched kernels.
AssignmentResult solve_assignment(const std::vector<double>& cost, std::size_t n,
                                  const kernels::KernelTable& k) {
  if (cost.size() != n * n) throw InputError("assignment: cost matrix is not n x n");
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1), used(n + 1);
  std::vector<std::int64_t> way(n + 1, 0);
  std::vector<std::size_t> owner(n + 1, 0);  // owner[j] = row matched to column j (1-based)
  std::vector<std::size_t> used_cols;
  AssignmentResult res;

  for (std::size_t i = 1; i <= n; ++i) {
    owner[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0.0);
    used_cols.clear();
    do {
      used[j0] = 1.0;
      used_cols.push_back(j0);
      const std::size_t i0 = owner[j0];
      const kernels::ScanResult r =
          k.relax_row(cost.data() + (i0 - 1) * n, u[i0], v.data() + 1, used.data() + 1,
                      minv.data() + 1, way.data() + 1, static_cast<std::int64_t>(j0), n);
      if (r.index < 0 || !(r.value < inf)) throw NumericalError("assignment: no augmenting column");
      const double delta = r.value;
      for (std::size_t j : used_cols) u[owner[j]] += delta;
      k.shift_masked(v.data(), used.data(), 1.0, delta, n + 1);
      k.shift_masked(minv.data(), used.data(), 0.0, delta, n + 1);
      j0 = static_cast<std::size_t>(r.index) + 1;
      ++res.iterations;
    } while (owner[j0] != 0);
    do {
      const std::size_t j1 = static_cast<std::size_t>(way[j0]);
      owner[j0] = owner[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  res.row_to_col.assign(n, 0);
  for (std::size_t j = 1; j <= n; ++j) res.row_to_col[owner[j] - 1] = j - 1;
  res.u.assign(u.begin() + 1, u.end());
  res.v.assign(v.begin() + 1, v.end());
  return res;
}

}  // namespace ctrans
