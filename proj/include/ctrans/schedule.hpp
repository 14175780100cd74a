#pragma once

#include "ctrans/field.hpp"
#include "ctrans/region.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace ctrans {

// One phase of a control schedule. `total` is the velocity v + 1_omega u the
// particles follow and `control` is u itself. For segments whose control is
// a per-particle witness (stopped flows, geodesics) `control` is a spatial
// representative used for support checks and the trajectory is recorded
// directly.
struct Segment {
  std::string label;  // storage, funnel, grid, geodesic, hold
  double t_start = 0.0;
  double t_end = 0.0;
  TimeField total;
  TimeField control;
  nlohmann::json descriptor = nlohmann::json::object();
  bool witness = false;
};

class ControlSchedule {
 public:
  // Segments must be contiguous from time 0.
  void append(Segment s);
  const std::vector<Segment>& segments() const { return segments_; }
  double horizon() const { return segments_.empty() ? 0.0 : segments_.back().t_end; }
  bool empty() const { return segments_.empty(); }

  // Right-continuous concatenation of the total fields.
  TimeField total_field() const;

  // Largest |control| over random samples drawn in `box` that fall outside
  // omega, per segment.
  std::vector<double> control_outside(const Region& omega, const Box& box, std::size_t samples,
                                      std::uint64_t seed) const;

  nlohmann::json to_json() const;

 private:
  std::vector<Segment> segments_;
};

}  // namespace ctrans
