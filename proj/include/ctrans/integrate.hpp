#pragma once

#include "ctrans/field.hpp"
#include "ctrans/measure.hpp"

#include <optional>
#include <vector>

namespace ctrans {

// Fixed RK4 step used on [t0, t1]: min(tol^(1/4), 0.1 / max(L, 1)).
double rk4_step(const TimeField& field, double tol);

// Flow map of the field from (x0, t0) to t1 (t1 < t0 integrates backward).
// Piecewise fields are integrated piece by piece. Throws NumericalError with
// the location and time of the first non-finite value.
std::vector<double> integrate_flow(const TimeField& field, std::span<const double> x0, double t0,
                                   double t1, double tol);

// Every particle advected independently; weights and tags kept.
ParticleMeasure flow_push(const TimeField& field, const ParticleMeasure& mu, double t0, double t1,
                          double tol);

struct StoppedPoint {
  std::vector<double> endpoint;
  std::optional<double> hit_time;  // elapsed time from t0 to first entry
};

// Integrates from (x0, t0) until the point first enters the closure of
// stop_region, then holds it there. The entry time is bracketed between two
// steps and bisected 40 times; the endpoint is the inside end of the bracket.
StoppedPoint stopped_flow(const TimeField& field, const Region& stop_region,
                          std::span<const double> x0, double t0, double horizon, double tol);

}  // namespace ctrans
