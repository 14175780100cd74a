#pragma once

#include "ctrans/measure.hpp"
#include "ctrans/random.hpp"

#include <vector>

namespace testing {

inline ctrans::ParticleMeasure random_cloud(ctrans::Rng& rng, int dim, std::size_t n, double lo = 0.0,
                                            double hi = 1.0) {
  std::vector<double> pos(n * dim);
  for (double& x : pos) x = rng.uniform(lo, hi);
  return ctrans::ParticleMeasure::uniform_weights(dim, std::move(pos));
}

}  // namespace testing
