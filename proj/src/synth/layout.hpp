#pragma once

// Shared by the two controllers: the control-region layout, the untouched-set
// bookkeeping and segment factories that can be rebuilt from descriptors.

#include "ctrans/synth.hpp"

#include <json.hpp>

#include <cstdint>
#include <vector>

namespace ctrans::detail {

struct Layout {
  double margin = 0.0;
  Region storage;  // omega shrunk by margin / 2
  Region omega1;   // omega shrunk by margin / 4
  double taper = 0.0;
  Box s;           // cube where the grid acts
  Region s0;       // ball at the centre of s, radius side / 4
  Box unit;        // image of the unit box, side 0.6 * side
  double side = 0.0;
};

// omega must be a single box or ball.
Layout make_layout(const Region& omega, double margin);
nlohmann::json layout_json(const Layout& g);

// Smallest power of two with 1/k below the inradius of r.
double first_k(const Region& r);

// Indices of the particles outside r.
std::vector<std::size_t> outside(const ParticleMeasure& mu, const Region& r);

// Tags `count` particles with 1: the forced ones first, then a seeded random
// fill from the rest.
ParticleMeasure tag_untouched(const ParticleMeasure& mu, std::vector<std::size_t> forced, std::size_t count,
                              std::uint64_t seed);

// Segment factories. `sign` = -1 builds the field for -v and negates it,
// which is how backward phases are replayed forward.
Segment storage_segment(const TimeField& v, const Region& region, double k, double floor, int sign,
                        double t0, double t1);
Segment funnel_segment(const TimeField& v, const Region& omega1, const Region& s0, double k, double taper,
                       int sign, double t0, double t1);
Segment grid_segment(const TimeField& v, const GridControl& grid, const Box& s, const Box& unit, double t0);

std::vector<double> times_between(double t0, double t1, std::size_t intervals);

}  // namespace ctrans::detail
