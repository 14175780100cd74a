#include "ctrans/region.hpp"

#include "ctrans/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ctrans {

namespace {

int primitive_dim(const Primitive& p) {
  return std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Box>) return static_cast<int>(s.lo.size());
        else return static_cast<int>(s.center.size());
      },
      p);
}

void check_primitive(const Primitive& p) {
  if (const auto* b = std::get_if<Box>(&p)) {
    if (b->lo.empty() || b->lo.size() != b->hi.size())
      throw InputError("box: lo and hi must be nonempty and of equal length");
    for (std::size_t i = 0; i < b->lo.size(); ++i) {
      if (!std::isfinite(b->lo[i]) || !std::isfinite(b->hi[i]) || !(b->lo[i] < b->hi[i]))
        throw InputError("box: need finite lo < hi on every axis");
    }
  } else {
    const auto& s = std::get<Ball>(p);
    if (s.center.empty()) throw InputError("ball: empty center");
    for (double c : s.center)
      if (!std::isfinite(c)) throw InputError("ball: non-finite center");
    if (!(s.radius > 0.0) || !std::isfinite(s.radius))
      throw InputError("ball: radius must be positive and finite");
  }
}

std::vector<double> json_vector(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw InputError(std::string("region: missing field '") + key + "'");
  try {
    return j.at(key).get<std::vector<double>>();
  } catch (const nlohmann::json::exception&) {
    throw InputError(std::string("region: field '") + key + "' must be a number array");
  }
}

}  // namespace

double signed_distance(const Primitive& p, std::span<const double> x) {
  if (const auto* b = std::get_if<Box>(&p)) {
    double outside = 0.0;
    double inside = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < b->lo.size(); ++i) {
      const double c = 0.5 * (b->lo[i] + b->hi[i]);
      const double h = 0.5 * (b->hi[i] - b->lo[i]);
      const double q = std::abs(x[i] - c) - h;
      if (q > 0.0) outside += q * q;
      inside = std::max(inside, q);
    }
    return std::sqrt(outside) + std::min(inside, 0.0);
  }
  const auto& s = std::get<Ball>(p);
  double r2 = 0.0;
  for (std::size_t i = 0; i < s.center.size(); ++i) {
    const double d = x[i] - s.center[i];
    r2 += d * d;
  }
  return std::sqrt(r2) - s.radius;
}

Box expand(const Box& box, double r) {
  Box out = box;
  for (std::size_t i = 0; i < out.lo.size(); ++i) {
    out.lo[i] -= r;
    out.hi[i] += r;
  }
  return out;
}

bool box_inside_box(const Box& inner, const Box& outer) {
  for (std::size_t i = 0; i < inner.lo.size(); ++i)
    if (inner.lo[i] < outer.lo[i] || inner.hi[i] > outer.hi[i]) return false;
  return true;
}

Region::Region(Box box) {
  Primitive p(std::move(box));
  check_primitive(p);
  dim_ = primitive_dim(p);
  parts_.push_back(std::move(p));
}

Region::Region(Ball ball) {
  Primitive p(std::move(ball));
  check_primitive(p);
  dim_ = primitive_dim(p);
  parts_.push_back(std::move(p));
}

Region Region::union_of(std::vector<Primitive> parts) {
  Region r;
  for (auto& p : parts) {
    check_primitive(p);
    const int d = primitive_dim(p);
    if (r.dim_ == 0) r.dim_ = d;
    if (d != r.dim_) throw InputError("region union: parts of different dimension");
    r.parts_.push_back(std::move(p));
  }
  return r;
}

double Region::signed_distance(std::span<const double> x) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : parts_) best = std::min(best, ctrans::signed_distance(p, x));
  return best;
}

double Region::depth(std::span<const double> x) const {
  return std::max(0.0, -signed_distance(x));
}

Region Region::shrink(double r) const {
  if (r < 0.0) return inflate(-r);
  Region out;
  out.dim_ = dim_;
  for (const auto& p : parts_) {
    if (const auto* b = std::get_if<Box>(&p)) {
      Box s = expand(*b, -r);
      bool ok = true;
      for (std::size_t i = 0; i < s.lo.size(); ++i) ok = ok && s.lo[i] < s.hi[i];
      if (ok) out.parts_.emplace_back(std::move(s));
    } else {
      Ball s = std::get<Ball>(p);
      s.radius -= r;
      if (s.radius > 0.0) out.parts_.emplace_back(std::move(s));
    }
  }
  return out;
}

Region Region::inflate(double r) const {
  Region out;
  out.dim_ = dim_;
  for (const auto& p : parts_) {
    if (const auto* b = std::get_if<Box>(&p)) {
      out.parts_.emplace_back(expand(*b, r));
    } else {
      Ball s = std::get<Ball>(p);
      s.radius += r;
      out.parts_.emplace_back(std::move(s));
    }
  }
  return out;
}

Region Region::translate(std::span<const double> offset) const {
  Region out = *this;
  for (auto& p : out.parts_) {
    if (auto* b = std::get_if<Box>(&p)) {
      for (std::size_t i = 0; i < b->lo.size(); ++i) {
        b->lo[i] += offset[i];
        b->hi[i] += offset[i];
      }
    } else {
      auto& s = std::get<Ball>(p);
      for (std::size_t i = 0; i < s.center.size(); ++i) s.center[i] += offset[i];
    }
  }
  return out;
}

Box Region::bounding_box() const {
  Box out;
  out.lo.assign(dim_, std::numeric_limits<double>::infinity());
  out.hi.assign(dim_, -std::numeric_limits<double>::infinity());
  for (const auto& p : parts_) {
    for (int i = 0; i < dim_; ++i) {
      double lo, hi;
      if (const auto* b = std::get_if<Box>(&p)) {
        lo = b->lo[i];
        hi = b->hi[i];
      } else {
        const auto& s = std::get<Ball>(p);
        lo = s.center[i] - s.radius;
        hi = s.center[i] + s.radius;
      }
      out.lo[i] = std::min(out.lo[i], lo);
      out.hi[i] = std::max(out.hi[i], hi);
    }
  }
  return out;
}

double Region::inradius() const {
  double best = 0.0;
  for (const auto& p : parts_) {
    if (const auto* b = std::get_if<Box>(&p)) {
      double h = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < b->lo.size(); ++i) h = std::min(h, 0.5 * (b->hi[i] - b->lo[i]));
      best = std::max(best, h);
    } else {
      best = std::max(best, std::get<Ball>(p).radius);
    }
  }
  return best;
}

bool Region::contains_box(const Box& box) const {
  for (const auto& p : parts_) {
    if (const auto* b = std::get_if<Box>(&p)) {
      if (box_inside_box(box, *b)) return true;
    } else {
      const auto& s = std::get<Ball>(p);
      double far2 = 0.0;
      for (std::size_t i = 0; i < s.center.size(); ++i) {
        const double d = std::max(std::abs(box.lo[i] - s.center[i]), std::abs(box.hi[i] - s.center[i]));
        far2 += d * d;
      }
      if (far2 <= s.radius * s.radius) return true;
    }
  }
  return false;
}

bool Region::intersects_box(const Box& box) const {
  for (const auto& p : parts_) {
    if (const auto* b = std::get_if<Box>(&p)) {
      bool overlap = true;
      for (std::size_t i = 0; i < box.lo.size(); ++i)
        overlap = overlap && box.lo[i] < b->hi[i] && b->lo[i] < box.hi[i];
      if (overlap) return true;
    } else {
      const auto& s = std::get<Ball>(p);
      double d2 = 0.0;
      for (std::size_t i = 0; i < s.center.size(); ++i) {
        const double c = std::clamp(s.center[i], box.lo[i], box.hi[i]);
        d2 += (c - s.center[i]) * (c - s.center[i]);
      }
      if (d2 < s.radius * s.radius) return true;
    }
  }
  return false;
}

nlohmann::json Region::to_json() const {
  auto one = [](const Primitive& p) {
    if (const auto* b = std::get_if<Box>(&p))
      return nlohmann::json{{"kind", "box"}, {"lo", b->lo}, {"hi", b->hi}};
    const auto& s = std::get<Ball>(p);
    return nlohmann::json{{"kind", "ball"}, {"center", s.center}, {"radius", s.radius}};
  };
  if (parts_.size() == 1) return one(parts_.front());
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& p : parts_) arr.push_back(one(p));
  return nlohmann::json{{"kind", "union"}, {"parts", arr}};
}

Region Region::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
    throw InputError("region: expected an object with a string 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "box") {
    Box b;
    if (j.contains("lo")) {
      b.lo = json_vector(j, "lo");
      b.hi = json_vector(j, "hi");
    } else {
      b.lo = json_vector(j, "corner");
      const auto ext = json_vector(j, "extents");
      if (ext.size() != b.lo.size()) throw InputError("box: corner/extents length mismatch");
      b.hi = b.lo;
      for (std::size_t i = 0; i < ext.size(); ++i) b.hi[i] += ext[i];
    }
    return Region(std::move(b));
  }
  if (kind == "ball") {
    Ball s;
    s.center = json_vector(j, "center");
    if (!j.contains("radius") || !j.at("radius").is_number())
      throw InputError("ball: missing numeric 'radius'");
    s.radius = j.at("radius").get<double>();
    return Region(std::move(s));
  }
  if (kind == "union") {
    if (!j.contains("parts") || !j.at("parts").is_array() || j.at("parts").empty())
      throw InputError("union: 'parts' must be a nonempty array");
    std::vector<Primitive> parts;
    for (const auto& pj : j.at("parts")) {
      Region r = from_json(pj);
      for (const auto& p : r.parts()) parts.push_back(p);
    }
    return union_of(std::move(parts));
  }
  throw InputError("region: unknown kind '" + kind + "'");
}

}  // namespace ctrans
