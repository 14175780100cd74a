#include "ctrans/schedule.hpp"

#include "ctrans/errors.hpp"
#include "ctrans/random.hpp"

#include <cmath>

namespace ctrans {

void ControlSchedule::append(Segment s) {
  const double start = segments_.empty() ? 0.0 : segments_.back().t_end;
  if (s.t_start != start) throw InputError("schedule: segment '" + s.label + "' is not contiguous");
  if (!(s.t_end >= s.t_start)) throw InputError("schedule: segment '" + s.label + "' is reversed");
  if (!s.total.valid() || !s.control.valid()) throw InputError("schedule: segment without fields");
  segments_.push_back(std::move(s));
}

TimeField ControlSchedule::total_field() const {
  if (segments_.empty()) throw InputError("schedule: empty");
  std::vector<FieldPiece> pieces;
  for (const auto& s : segments_)
    pieces.push_back({s.t_start, s.t_end, std::make_shared<const TimeField>(s.total)});
  return TimeField::piecewise(segments_.front().total.dim(), std::move(pieces), {{"kind", "schedule"}});
}

std::vector<double> ControlSchedule::control_outside(const Region& omega, const Box& box,
                                                     std::size_t samples, std::uint64_t seed) const {
  std::vector<double> out;
  const std::size_t d = box.lo.size();
  for (const auto& s : segments_) {
    Rng rng(seed);
    std::vector<double> x(d), u(d);
    double worst = 0.0;
    for (std::size_t k = 0; k < samples; ++k) {
      for (std::size_t a = 0; a < d; ++a) x[a] = rng.uniform(box.lo[a], box.hi[a]);
      const double t = s.t_start + rng.uniform() * (s.t_end - s.t_start);
      if (omega.contains(x)) continue;
      s.control.evaluate(x, t, u);
      double n2 = 0.0;
      for (double c : u) n2 += c * c;
      worst = std::max(worst, std::sqrt(n2));
    }
    out.push_back(worst);
  }
  return out;
}

nlohmann::json ControlSchedule::to_json() const {
  nlohmann::json segs = nlohmann::json::array();
  for (const auto& s : segments_)
    segs.push_back({{"label", s.label},
                    {"t_start", s.t_start},
                    {"t_end", s.t_end},
                    {"witness", s.witness},
                    {"field", s.descriptor}});
  return {{"horizon", horizon()}, {"segments", segs}};
}

}  // namespace ctrans
