#include "ctrans/errors.hpp"
#include "ctrans/ot.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <unordered_map>

namespace ctrans {

// Successive shortest paths on the dense bipartite graph. Forward arcs i->j
// always exist; a backward arc j->i exists while flow(i,j) > 0. Every source
// with remaining supply is a root at distance 0 (its potential never moves),
// and Dijkstra stops at the first sink with remaining demand.
TransportSolution solve_transport(const std::vector<double>& cost, const std::vector<double>& a,
                                  const std::vector<double>& b, const kernels::KernelTable& k) {
  const std::size_t n = a.size(), m = b.size();
  if (cost.size() != n * m) throw InputError("transport: cost matrix shape mismatch");
  constexpr double inf = std::numeric_limits<double>::infinity();
  const double total = std::accumulate(a.begin(), a.end(), 0.0);
  const double eps = 1e-14 * std::max(total, 1e-300);

  std::vector<double> rem_a = a, rem_b = b;
  std::vector<double> pi_s(n, 0.0), pi_t(m, 0.0);
  std::vector<double> dist_s(n), dist_t(m), fin_s(n), fin_t(m);
  std::vector<std::int64_t> par_s(n), par_t(m);
  std::unordered_map<std::uint64_t, double> flow;
  std::vector<std::vector<std::size_t>> by_sink(m);
  auto key = [m](std::size_t i, std::size_t j) { return static_cast<std::uint64_t>(i) * m + j; };

  TransportSolution sol;
  auto active_sources = [&] {
    for (double r : rem_a)
      if (r > eps) return true;
    return false;
  };
  auto open_sinks = [&] {
    for (double r : rem_b)
      if (r > eps) return true;
    return false;
  };

  while (active_sources() && open_sinks()) {
    for (std::size_t i = 0; i < n; ++i) {
      dist_s[i] = rem_a[i] > eps ? 0.0 : inf;
      par_s[i] = -1;
    }
    std::fill(dist_t.begin(), dist_t.end(), inf);
    std::fill(fin_s.begin(), fin_s.end(), 0.0);
    std::fill(fin_t.begin(), fin_t.end(), 0.0);
    std::int64_t sink = -1;
    for (;;) {
      const auto rs = k.argmin_masked(dist_s.data(), fin_s.data(), n);
      const auto rt = k.argmin_masked(dist_t.data(), fin_t.data(), m);
      if (rs.index < 0 && rt.index < 0) break;
      if (rs.index >= 0 && (rt.index < 0 || rs.value <= rt.value)) {
        const auto i = static_cast<std::size_t>(rs.index);
        fin_s[i] = 1.0;
        k.relax_row(cost.data() + i * m, -(dist_s[i] + pi_s[i]), pi_t.data(), fin_t.data(),
                    dist_t.data(), par_t.data(), rs.index, m);
      } else {
        const auto j = static_cast<std::size_t>(rt.index);
        fin_t[j] = 1.0;
        if (rem_b[j] > eps) {
          sink = rt.index;
          break;
        }
        for (std::size_t i : by_sink[j]) {
          if (fin_s[i] != 0.0) continue;
          auto it = flow.find(key(i, j));
          if (it == flow.end() || !(it->second > 0.0)) continue;
          const double cand = ((dist_t[j] - cost[i * m + j]) + pi_t[j]) - pi_s[i];
          if (cand < dist_s[i]) {
            dist_s[i] = cand;
            par_s[i] = rt.index;
          }
        }
      }
    }
    if (sink < 0) throw NumericalError("transport: no augmenting path (unequal masses?)");
    ++sol.iterations;

    const double reach = dist_t[sink];
    for (std::size_t i = 0; i < n; ++i) pi_s[i] += fin_s[i] != 0.0 ? dist_s[i] : reach;
    for (std::size_t j = 0; j < m; ++j) pi_t[j] += fin_t[j] != 0.0 ? dist_t[j] : reach;

    // Walk back to the root source, collecting the bottleneck.
    double theta = rem_b[sink];
    std::size_t j = static_cast<std::size_t>(sink);
    std::size_t root = 0;
    for (;;) {
      const auto i = static_cast<std::size_t>(par_t[j]);
      if (par_s[i] < 0) {
        root = i;
        theta = std::min(theta, rem_a[i]);
        break;
      }
      const auto jb = static_cast<std::size_t>(par_s[i]);
      theta = std::min(theta, flow[key(i, jb)]);
      j = jb;
    }
    j = static_cast<std::size_t>(sink);
    for (;;) {
      const auto i = static_cast<std::size_t>(par_t[j]);
      auto [it, fresh] = flow.try_emplace(key(i, j), 0.0);
      if (fresh || it->second == 0.0) {
        if (std::find(by_sink[j].begin(), by_sink[j].end(), i) == by_sink[j].end())
          by_sink[j].push_back(i);
      }
      it->second += theta;
      if (par_s[i] < 0) break;
      const auto jb = static_cast<std::size_t>(par_s[i]);
      double& back = flow[key(i, jb)];
      back -= theta;
      if (back <= eps) back = 0.0;
      j = jb;
    }
    rem_a[root] -= theta;
    rem_b[sink] -= theta;
    if (rem_a[root] <= eps) rem_a[root] = 0.0;
    if (rem_b[sink] <= eps) rem_b[sink] = 0.0;
  }

  for (std::size_t jj = 0; jj < m; ++jj) {
    auto& srcs = by_sink[jj];
    std::sort(srcs.begin(), srcs.end());
    for (std::size_t i : srcs) {
      const double f = flow[key(i, jj)];
      if (f > eps) sol.entries.push_back({i, jj, f});
    }
  }
  std::sort(sol.entries.begin(), sol.entries.end(), [](const PlanEntry& x, const PlanEntry& y) {
    return x.source < y.source || (x.source == y.source && x.target < y.target);
  });
  sol.pi_source = std::move(pi_s);
  sol.pi_target = std::move(pi_t);
  return sol;
}

}  // namespace ctrans
