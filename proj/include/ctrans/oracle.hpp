#pragma once

#include "ctrans/measure.hpp"

namespace ctrans::oracle {

// Exact W_p between two equal-weight clouds of at most 8 atoms each, by
// enumerating every assignment.
double brute_force_wp(const ParticleMeasure& mu, const ParticleMeasure& nu, int p);

// q-quantile at time t of the law transported by x' = sqrt(x) (0 for x <= 0)
// from the uniform density on (-1, 1).
double sqrt_field_solution(double t, double q);

// W1 between 1/2 U(-1,0) + 1/2 U(1,2) and 1/2 U(-1,1) from their quantile
// functions.
double two_bump_quantile_w1();

}  // namespace ctrans::oracle
