#pragma once

#include "ctrans/measure.hpp"
#include "ctrans/region.hpp"

#include <json.hpp>

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace ctrans {

// Absolutely continuous law with bounded support. Kinds:
//   uniform-on-box                 box
//   gaussian-truncated             mean, sigma, radius (support is the ball)
//   mixture                        weights, components
//   indicator-with-density-profile box, gradient: density ∝ 1 + g·(x - centre)
struct DensitySpec {
  std::string kind;
  int dim = 0;
  Box box;
  std::vector<double> mean;
  double sigma = 0.0;
  double radius = 0.0;
  std::vector<double> gradient;
  std::vector<double> mixture_weights;
  std::vector<DensitySpec> components;

  static DensitySpec uniform_box(Box box);
  static DensitySpec gaussian(std::vector<double> mean, double sigma, double radius);
  static DensitySpec mixture(std::vector<double> weights, std::vector<DensitySpec> parts);
  static DensitySpec profile(Box box, std::vector<double> gradient);

  // Throws InputError for unknown kinds, unbounded support, or densities
  // that cannot be normalized.
  void validate() const;
  Box support_bbox() const;
  // Normalized density value.
  double density(std::span<const double> x) const;

  nlohmann::json to_json() const;
  static DensitySpec from_json(const nlohmann::json& j);
};

// i.i.d. draws with weights 1/count.
ParticleMeasure sample(const DensitySpec& spec, std::size_t count, std::uint64_t seed);

// One draw per quantile stratum (k + U)/count; one-dimensional specs only.
ParticleMeasure sample_stratified(const DensitySpec& spec, std::size_t count,
                                  std::uint64_t seed);

// Inverse CDF for one-dimensional specs.
double quantile_1d(const DensitySpec& spec, double q);
double cdf_1d(const DensitySpec& spec, double x);

}  // namespace ctrans
