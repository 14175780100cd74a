#pragma once

#include "ctrans/kernels.hpp"
#include "ctrans/measure.hpp"
#include "ctrans/measure_io.hpp"

#include <json.hpp>

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace ctrans {

struct PlanEntry {
  std::size_t source = 0;
  std::size_t target = 0;
  double mass = 0.0;
};

struct TransportPlan {
  std::vector<PlanEntry> entries;
  std::shared_ptr<const ParticleMeasure> source;
  std::shared_ptr<const ParticleMeasure> target;
  int p = 1;

  double entry_cost(const PlanEntry& e) const;  // mass * |x - y|^p
  double cost() const;
  // Max-norm deviation of row and column sums from the marginal weights.
  double marginal_residual() const;
};

struct SolverInfo {
  std::string method;
  std::string kernels;
  std::size_t iterations = 0;
  double marginal_residual = 0.0;
  double dual_residual = 0.0;  // largest violation of dual feasibility / slackness
};

struct WassersteinResult {
  double distance = 0.0;
  TransportPlan plan;
  SolverInfo info;
};

struct SolverOptions {
  std::size_t max_atoms = 2000;
  const kernels::KernelTable* kernels = nullptr;  // defaults to kernels::active()
};

// Dense square assignment: minimizes sum cost[i*n + col[i]].
struct AssignmentResult {
  std::vector<std::size_t> row_to_col;
  std::vector<double> u, v;  // duals, u_i + v_j <= cost_ij
  std::size_t iterations = 0;
};
AssignmentResult solve_assignment(const std::vector<double>& cost, std::size_t n,
                                  const kernels::KernelTable& k);

// Dense transportation problem by successive shortest paths with potentials.
struct TransportSolution {
  std::vector<PlanEntry> entries;
  std::vector<double> pi_source, pi_target;  // cost_ij + pi_i - pi_j >= 0
  std::size_t iterations = 0;
};
TransportSolution solve_transport(const std::vector<double>& cost, const std::vector<double>& a,
                                  const std::vector<double>& b, const kernels::KernelTable& k);

// Cost matrix |x_i - y_j|^p, row-major.
std::vector<double> cost_matrix(const ParticleMeasure& mu, const ParticleMeasure& nu, int p,
                                const kernels::KernelTable& k);

WassersteinResult wp_discrete(const ParticleMeasure& mu, const ParticleMeasure& nu, int p,
                              const SolverOptions& opts = {});

double w1_1d(const ParticleMeasure& mu, const ParticleMeasure& nu);

ParticleMeasure displacement_interpolate(const TransportPlan& plan, double t, double delta,
                                         bool merge = false);

struct InequalityCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
  double slack() const { return rhs - lhs; }
};

struct InequalityReport {
  std::vector<InequalityCheck> checks;
  bool all_hold() const;
  nlohmann::json to_json() const;
};

// Subadditivity for p in {1,2}, W1 <= W2 for both pairs, and
// W2 <= diam^{1/2} W1^{1/2} for both pairs.
InequalityReport wasserstein_inequality_suite(const ParticleMeasure& mu, const ParticleMeasure& nu,
                                              const ParticleMeasure& rho, const ParticleMeasure& eta,
                                              double tol = 1e-9);

// Uniformly chosen subset of at most cap particles, rescaled to the original mass.
ParticleMeasure subsample(const ParticleMeasure& mu, std::size_t cap, std::uint64_t seed);

// W1 with both measures subsampled to at most `cap` particles.
double w1_subsampled(const ParticleMeasure& a, const ParticleMeasure& b, std::size_t cap, std::uint64_t seed);

void check_equal_mass(const ParticleMeasure& mu, const ParticleMeasure& nu, const char* who);

std::string plan_to_csv(const TransportPlan& plan, const Provenance& prov);
nlohmann::json distance_report(const WassersteinResult& r, const Provenance& prov);

}  // namespace ctrans
