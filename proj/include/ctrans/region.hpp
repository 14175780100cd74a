#pragma once

#include <json.hpp>

#include <span>
#include <variant>
#include <vector>

namespace ctrans {

// Open axis-aligned box (lo, hi).
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;
};

// Open ball.
struct Ball {
  std::vector<double> center;
  double radius = 0.0;
};

using Primitive = std::variant<Box, Ball>;

// Finite union of open boxes and balls. Signed distance is negative inside,
// exact for a single primitive and the min over parts for a union.
class Region {
 public:
  Region() = default;
  explicit Region(Box box);
  explicit Region(Ball ball);
  static Region union_of(std::vector<Primitive> parts);

  int dim() const { return dim_; }
  const std::vector<Primitive>& parts() const { return parts_; }
  bool empty() const { return parts_.empty(); }
  bool is_convex() const { return parts_.size() == 1; }

  double signed_distance(std::span<const double> x) const;
  bool contains(std::span<const double> x) const { return signed_distance(x) < 0.0; }
  bool contains_closure(std::span<const double> x) const { return signed_distance(x) <= 0.0; }
  // d(x, complement); zero outside.
  double depth(std::span<const double> x) const;

  Region shrink(double r) const;
  Region inflate(double r) const;
  Region translate(std::span<const double> offset) const;

  Box bounding_box() const;
  // Largest inscribed radius over the parts.
  double inradius() const;
  bool contains_box(const Box& box) const;
  bool intersects_box(const Box& box) const;

  nlohmann::json to_json() const;
  static Region from_json(const nlohmann::json& j);

 private:
  int dim_ = 0;
  std::vector<Primitive> parts_;
};

double signed_distance(const Primitive& p, std::span<const double> x);
Box expand(const Box& box, double r);
bool box_inside_box(const Box& inner, const Box& outer);

}  // namespace ctrans
