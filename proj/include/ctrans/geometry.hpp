#pragma once

#include "ctrans/field.hpp"
#include "ctrans/measure.hpp"
#include "ctrans/region.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ctrans {

struct ScalarField {
  std::function<double(std::span<const double>)> value;
  std::function<void(std::span<const double>, std::span<double>)> gradient;
  std::string note;
};

// 6s^5 - 15s^4 + 10s^3 clamped to [0, 1]; C^2 at both ends.
double smoothstep(double s);
double smoothstep_derivative(double s);
inline constexpr double kSmoothstepSlope = 1.875;  // max of smoothstep'

// Depth d(x, complement) and its gradient (the gradient of the deepest part).
double region_depth(const Region& r, std::span<const double> x, std::span<double> grad);

// theta = 1 - smoothstep(k * d(x, omega0^c)): 1 outside omega0, 0 where the
// depth reaches 1/k. Rejects 1/k >= inradius.
ScalarField cutoff_theta(const Region& omega0, double k);

struct EtaResult {
  ScalarField eta;
  double kappa0 = 0.0;  // sampled lower bound of |grad eta| off s0
  double kappa1 = 0.0;
  double sup = 0.0;      // max of eta
  double hessian_bound = 0.0;  // sampled bound on the gradient's Lipschitz constant
  std::vector<double> peak;    // the unique critical point
};

// Positive weight on omega1 vanishing on its boundary, whose only critical
// point is the centre of s0. omega1 is a single ball or box; s0 a ball or box
// inside it. kappa0 is certified on the sampled set omega1 minus s0, with a
// thin layer next to box corners excluded (the tensor profile's gradient
// vanishes at corners). Throws InputError("critical point detected ...") when a
// sample's gradient falls below 1e-6.
EtaResult weight_eta(const Region& omega1, const Region& s0, std::size_t samples_per_axis = 64);

struct HitRecord {
  std::vector<double> times;   // elapsed time to first entry
  std::vector<double> points;  // entry points, row-major
};

struct GeometricCheck {
  double t0_star = 0.0;
  double t1_star = 0.0;
  double margin = 0.0;  // hit times are measured into omega shrunk by margin
  Region omega0;
  bool omega0_fallback = false;
  HitRecord forward;
  HitRecord backward;
  std::size_t resolution = 0;  // particles checked
};

// Forward paths of mu0 and backward paths of mu1 under the autonomous field
// v must enter omega within horizon. Throws GeometricConditionError naming the
// first particle that does not.
GeometricCheck check_geometric_condition(const TimeField& v, const ParticleMeasure& mu0,
                                         const ParticleMeasure& mu1, const Region& omega,
                                         double horizon, double tol, double margin);

// Largest axis-aligned cube inside `outer` that misses `obstacle`, by grid
// search over lower corners with a bisection on the side. nullopt if none.
std::optional<Box> place_cube(const Region& outer, const Region& obstacle,
                              std::size_t grid = 40);

}  // namespace ctrans
