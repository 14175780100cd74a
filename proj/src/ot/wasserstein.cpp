#include "ctrans/errors.hpp"
#include "ctrans/ot.hpp"
#include "ctrans/random.hpp"
#include "ctrans/text.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace ctrans {

namespace {

double point_cost(std::span<const double> x, std::span<const double> y, int p) {
  double s = 0.0;
  for (std::size_t a = 0; a < x.size(); ++a) {
    const double d = x[a] - y[a];
    s += d * d;
  }
  return p == 2 ? s : p == 1 ? std::sqrt(s) : std::pow(std::sqrt(s), p);
}

bool equal_weight_square(const ParticleMeasure& mu, const ParticleMeasure& nu) {
  if (mu.size() != nu.size()) return false;
  const double w = mu.weight(0);
  for (double x : mu.weights())
    if (x != w) return false;
  for (double x : nu.weights())
    if (std::abs(x - w) > 1e-14 * w) return false;
  return true;
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(17);
  ss << v;
  return ss.str();
}

}  // namespace

void check_equal_mass(const ParticleMeasure& mu, const ParticleMeasure& nu, const char* who) {
  if (mu.dim() != nu.dim()) throw InputError(std::string(who) + ": dimension mismatch");
  if (mu.is_empty() || nu.is_empty()) throw InputError(std::string(who) + ": empty measure");
  const double a = mu.total_mass(), b = nu.total_mass();
  if (std::abs(a - b) > 1e-10 * std::max(1.0, std::max(a, b)))
    throw InputError(std::string(who) + ": unequal masses " + fmt(a) + " and " + fmt(b) +
                     "; normalize both measures first");
}

double TransportPlan::entry_cost(const PlanEntry& e) const {
  return e.mass * point_cost(source->position(e.source), target->position(e.target), p);
}

double TransportPlan::cost() const {
  double s = 0.0, c = 0.0;
  for (const auto& e : entries) {
    const double y = entry_cost(e) - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return s;
}

double TransportPlan::marginal_residual() const {
  std::vector<double> row(source->size(), 0.0), col(target->size(), 0.0);
  for (const auto& e : entries) {
    row[e.source] += e.mass;
    col[e.target] += e.mass;
  }
  double r = 0.0;
  for (std::size_t i = 0; i < row.size(); ++i) r = std::max(r, std::abs(row[i] - source->weight(i)));
  for (std::size_t j = 0; j < col.size(); ++j) r = std::max(r, std::abs(col[j] - target->weight(j)));
  return r;
}

std::vector<double> cost_matrix(const ParticleMeasure& mu, const ParticleMeasure& nu, int p,
                                const kernels::KernelTable& k) {
  const std::size_t n = mu.size(), m = nu.size();
  const int d = mu.dim();
  std::vector<double> targets(m * d);
  for (std::size_t j = 0; j < m; ++j)
    for (int a = 0; a < d; ++a) targets[a * m + j] = nu.coord(j, a);
  std::vector<double> cost(n * m);
  for (std::size_t i = 0; i < n; ++i)
    k.cost_row(mu.position(i).data(), targets.data(), m, d, p, cost.data() + i * m);
  return cost;
}

WassersteinResult wp_discrete(const ParticleMeasure& mu, const ParticleMeasure& nu, int p,
                              const SolverOptions& opts) {
  if (p != 1 && p != 2) throw InputError("wp_discrete: p must be 1 or 2");
  check_equal_mass(mu, nu, "wp_discrete");
  if (mu.size() > opts.max_atoms || nu.size() > opts.max_atoms)
    throw InputError("wp_discrete: " + std::to_string(mu.size()) + " x " + std::to_string(nu.size()) +
                     " atoms exceeds the exact-solver cap of " + std::to_string(opts.max_atoms) +
                     " per side; subsample both measures with a fixed seed");
  const kernels::KernelTable& k = opts.kernels ? *opts.kernels : kernels::active();

  WassersteinResult res;
  res.plan.source = std::make_shared<const ParticleMeasure>(mu);
  res.plan.target = std::make_shared<const ParticleMeasure>(nu);
  res.plan.p = p;
  res.info.kernels = k.name;
  const std::vector<double> cost = cost_matrix(mu, nu, p, k);
  const std::size_t n = mu.size(), m = nu.size();

  double dual = 0.0;
  if (equal_weight_square(mu, nu)) {
    res.info.method = "assignment";
    const auto a = solve_assignment(cost, n, k);
    res.info.iterations = a.iterations;
    for (std::size_t i = 0; i < n; ++i) res.plan.entries.push_back({i, a.row_to_col[i], mu.weight(i)});
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        const double slack = cost[i * m + j] - a.u[i] - a.v[j];
        dual = std::max(dual, -slack);
        if (a.row_to_col[i] == j) dual = std::max(dual, std::abs(slack));
      }
    }
  } else {
    res.info.method = "transport";
    const auto t = solve_transport(cost, mu.weights(), nu.weights(), k);
    res.info.iterations = t.iterations;
    res.plan.entries = t.entries;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        const double reduced = cost[i * m + j] + t.pi_source[i] - t.pi_target[j];
        dual = std::max(dual, -reduced);
      }
    }
    for (const auto& e : t.entries) {
      const double reduced = cost[e.source * m + e.target] + t.pi_source[e.source] - t.pi_target[e.target];
      dual = std::max(dual, std::abs(reduced));
    }
  }
  res.info.dual_residual = dual;
  res.info.marginal_residual = res.plan.marginal_residual();
  const double c = std::max(0.0, res.plan.cost());
  res.distance = p == 1 ? c : std::sqrt(c);
  return res;
}

double w1_1d(const ParticleMeasure& mu, const ParticleMeasure& nu) {
  if (mu.dim() != 1 || nu.dim() != 1) throw InputError("w1_1d: one-dimensional measures required");
  check_equal_mass(mu, nu, "w1_1d");
  auto order = [](const ParticleMeasure& m) {
    std::vector<std::size_t> idx(m.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return m.coord(a, 0) < m.coord(b, 0) || (m.coord(a, 0) == m.coord(b, 0) && a < b);
    });
    return idx;
  };
  const auto ia = order(mu), ib = order(nu);
  std::size_t i = 0, j = 0;
  double ra = mu.weight(ia[0]), rb = nu.weight(ib[0]);
  double sum = 0.0, comp = 0.0;
  while (i < ia.size() && j < ib.size()) {
    const double q = std::min(ra, rb);
    const double y = q * std::abs(mu.coord(ia[i], 0) - nu.coord(ib[j], 0)) - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    ra -= q;
    rb -= q;
    if (ra <= 0.0 && ++i < ia.size()) ra = mu.weight(ia[i]);
    if (rb <= 0.0 && ++j < ib.size()) rb = nu.weight(ib[j]);
  }
  return sum;
}

ParticleMeasure displacement_interpolate(const TransportPlan& plan, double t, double delta,
                                         bool merge) {
  if (!(delta > 0.0)) throw InputError("displacement_interpolate: delta must be positive");
  if (!(t >= 0.0 && t <= delta)) throw InputError("displacement_interpolate: t outside [0, delta]");
  const int d = plan.source->dim();
  const double s = t / delta;
  std::vector<double> pos;
  std::vector<double> w;
  std::vector<int> tags;
  pos.reserve(plan.entries.size() * d);
  for (const auto& e : plan.entries) {
    auto x = plan.source->position(e.source);
    auto y = plan.target->position(e.target);
    for (int a = 0; a < d; ++a) pos.push_back(s == 1.0 ? y[a] : s == 0.0 ? x[a] : (1.0 - s) * x[a] + s * y[a]);
    w.push_back(e.mass);
    tags.push_back(plan.source->tag(e.source));
  }
  if (!plan.source->has_tags()) tags.clear();
  ParticleMeasure out(d, std::move(pos), std::move(w), std::move(tags));
  return merge ? merge_coincident(out) : out;
}

bool InequalityReport::all_hold() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.holds; });
}

nlohmann::json InequalityReport::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : checks)
    arr.push_back({{"name", c.name}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"slack", c.slack()}, {"holds", c.holds}});
  return nlohmann::json{{"checks", arr}, {"all_hold", all_hold()}};
}

InequalityReport wasserstein_inequality_suite(const ParticleMeasure& mu, const ParticleMeasure& nu,
                                              const ParticleMeasure& rho, const ParticleMeasure& eta,
                                              double tol) {
  InequalityReport rep;
  auto add = [&](std::string name, double lhs, double rhs) {
    rep.checks.push_back({std::move(name), lhs, rhs, lhs <= rhs + tol});
  };
  const ParticleMeasure sum_a = mu.concat(rho), sum_b = nu.concat(eta);
  for (int p : {1, 2}) {
    const double whole = std::pow(wp_discrete(sum_a, sum_b, p).distance, p);
    const double parts = std::pow(wp_discrete(mu, nu, p).distance, p) +
                         std::pow(wp_discrete(rho, eta, p).distance, p);
    add("subadditivity_p" + std::to_string(p), whole, parts);
  }
  auto diameter = [](const ParticleMeasure& a, const ParticleMeasure& b) {
    const ParticleMeasure all = a.concat(b);
    double best = 0.0;
    for (std::size_t i = 0; i < all.size(); ++i)
      for (std::size_t j = i + 1; j < all.size(); ++j)
        best = std::max(best, point_cost(all.position(i), all.position(j), 1));
    return best;
  };
  const std::pair<const ParticleMeasure*, const ParticleMeasure*> pairs[] = {{&mu, &nu}, {&rho, &eta}};
  const char* labels[] = {"mu_nu", "rho_eta"};
  for (int k = 0; k < 2; ++k) {
    const double w1 = wp_discrete(*pairs[k].first, *pairs[k].second, 1).distance;
    const double w2 = wp_discrete(*pairs[k].first, *pairs[k].second, 2).distance;
    // For non-probability pairs the comparison is made on normalized measures.
    const double mass = pairs[k].first->total_mass();
    const double w1n = w1 / mass, w2n = w2 / std::sqrt(mass);
    add(std::string("monotone_p_") + labels[k], w1n, w2n);
    const double diam = diameter(*pairs[k].first, *pairs[k].second);
    add(std::string("diameter_interpolation_") + labels[k], w2n, std::sqrt(diam) * std::sqrt(w1n));
  }
  return rep;
}

std::string plan_to_csv(const TransportPlan& plan, const Provenance& prov) {
  std::string out = prov.comment_line();
  out += "i,j,mass,cost_contribution\n";
  for (const auto& e : plan.entries)
    out += std::to_string(e.source) + "," + std::to_string(e.target) + "," + format_double(e.mass) +
           "," + format_double(plan.entry_cost(e)) + "\n";
  return out;
}

nlohmann::json distance_report(const WassersteinResult& r, const Provenance& prov) {
  nlohmann::json j{{"distance", r.distance},
                   {"p", r.plan.p},
                   {"method", r.info.method},
                   {"kernels", r.info.kernels},
                   {"iterations", r.info.iterations},
                   {"marginal_residual", r.info.marginal_residual},
                   {"dual_residual", r.info.dual_residual},
                   {"plan_entries", r.plan.entries.size()},
                   {"source_checksum", measure_checksum(*r.plan.source)},
                   {"target_checksum", measure_checksum(*r.plan.target)}};
  prov.stamp(j);
  return j;
}

ParticleMeasure subsample(const ParticleMeasure& mu, std::size_t cap, std::uint64_t seed) {
  if (mu.size() <= cap) return mu;
  std::vector<std::size_t> idx(mu.size());
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  for (std::size_t k = 0; k < cap; ++k) std::swap(idx[k], idx[k + rng.index(idx.size() - k)]);
  idx.resize(cap);
  std::sort(idx.begin(), idx.end());
  const ParticleMeasure sub = mu.subset(idx);
  return sub.scaled(mu.total_mass() / sub.total_mass());
}

double w1_subsampled(const ParticleMeasure& a, const ParticleMeasure& b, std::size_t cap, std::uint64_t seed) {
  const ParticleMeasure sa = subsample(a, cap, seed);
  ParticleMeasure sb = subsample(b, cap, seed ^ 0x9e3779b97f4a7c15ull);
  if (sb.total_mass() != sa.total_mass()) sb = sb.scaled(sa.total_mass() / sb.total_mass());
  return wp_discrete(sa, sb, 1).distance;
}

}  // namespace ctrans
