#include "ctrans/measure.hpp"

#include "ctrans/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

namespace ctrans {

ParticleMeasure::ParticleMeasure(int dim, std::vector<double> positions,
                                 std::vector<double> weights, std::vector<int> tags)
    : dim_(dim),
      positions_(std::move(positions)),
      weights_(std::move(weights)),
      tags_(std::move(tags)) {
  if (dim_ <= 0) throw InputError("measure: dimension must be positive");
  if (positions_.size() != weights_.size() * static_cast<std::size_t>(dim_))
    throw InputError("measure: positions length " + std::to_string(positions_.size()) +
                     " does not match " + std::to_string(weights_.size()) + " particles in dim " +
                     std::to_string(dim_));
  if (!tags_.empty() && tags_.size() != weights_.size())
    throw InputError("measure: tag count differs from particle count");
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (!(weights_[i] > 0.0) || !std::isfinite(weights_[i]))
      throw InputError("measure: particle " + std::to_string(i) + " has invalid weight");
  }
  for (std::size_t k = 0; k < positions_.size(); ++k) {
    if (!std::isfinite(positions_[k]))
      throw InputError("measure: particle " + std::to_string(k / dim_) + " has a non-finite coordinate");
  }
}

ParticleMeasure ParticleMeasure::empty(int dim) { return ParticleMeasure(dim, {}, {}); }

ParticleMeasure ParticleMeasure::uniform_weights(int dim, std::vector<double> positions,
                                                 double total) {
  const std::size_t n = dim > 0 ? positions.size() / dim : 0;
  std::vector<double> w(n, n ? total / static_cast<double>(n) : 0.0);
  return ParticleMeasure(dim, std::move(positions), std::move(w));
}

double ParticleMeasure::total_mass() const {
  // Compensated sum keeps mass bookkeeping at the 1e-15 level for large clouds.
  double sum = 0.0, comp = 0.0;
  for (double w : weights_) {
    const double y = w - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

double ParticleMeasure::max_weight() const {
  double m = 0.0;
  for (double w : weights_) m = std::max(m, w);
  return m;
}

Box ParticleMeasure::support_bbox() const {
  Box b;
  b.lo.assign(dim_, std::numeric_limits<double>::infinity());
  b.hi.assign(dim_, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < size(); ++i) {
    for (int a = 0; a < dim_; ++a) {
      b.lo[a] = std::min(b.lo[a], coord(i, a));
      b.hi[a] = std::max(b.hi[a], coord(i, a));
    }
  }
  return b;
}

ParticleMeasure ParticleMeasure::scaled(double factor) const {
  if (!(factor > 0.0)) throw InputError("measure: scale factor must be positive");
  std::vector<double> w = weights_;
  for (double& x : w) x *= factor;
  return ParticleMeasure(dim_, positions_, std::move(w), tags_);
}

ParticleMeasure ParticleMeasure::with_positions(std::vector<double> positions) const {
  return ParticleMeasure(dim_, std::move(positions), weights_, tags_);
}

ParticleMeasure ParticleMeasure::with_tags(std::vector<int> tags) const {
  return ParticleMeasure(dim_, positions_, weights_, std::move(tags));
}

ParticleMeasure ParticleMeasure::subset(std::span<const std::size_t> indices) const {
  std::vector<double> pos, w;
  std::vector<int> tags;
  pos.reserve(indices.size() * dim_);
  w.reserve(indices.size());
  for (std::size_t i : indices) {
    auto p = position(i);
    pos.insert(pos.end(), p.begin(), p.end());
    w.push_back(weights_[i]);
    if (!tags_.empty()) tags.push_back(tags_[i]);
  }
  return ParticleMeasure(dim_, std::move(pos), std::move(w), std::move(tags));
}

ParticleMeasure ParticleMeasure::concat(const ParticleMeasure& other) const {
  if (is_empty()) return other;
  if (other.is_empty()) return *this;
  if (other.dim_ != dim_) throw InputError("measure: cannot add measures of different dimension");
  std::vector<double> pos = positions_;
  pos.insert(pos.end(), other.positions_.begin(), other.positions_.end());
  std::vector<double> w = weights_;
  w.insert(w.end(), other.weights_.begin(), other.weights_.end());
  std::vector<int> tags;
  if (has_tags() || other.has_tags()) {
    for (std::size_t i = 0; i < size(); ++i) tags.push_back(tag(i));
    for (std::size_t i = 0; i < other.size(); ++i) tags.push_back(other.tag(i));
  }
  return ParticleMeasure(dim_, std::move(pos), std::move(w), std::move(tags));
}

ParticleMeasure ParticleMeasure::select_tag(int wanted, bool equal) const {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < size(); ++i)
    if ((tag(i) == wanted) == equal) idx.push_back(i);
  return subset(idx);
}

ParticleMeasure push_forward(const ParticleMeasure& mu, const PointMap& map) {
  const int d = mu.dim();
  std::vector<double> out(mu.positions().size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    std::span<double> dst(out.data() + i * d, d);
    map(mu.position(i), dst);
    for (double c : dst) {
      if (!std::isfinite(c))
        throw NumericalError("push_forward: particle " + std::to_string(i) +
                             " is mapped to a non-finite position");
    }
  }
  return mu.with_positions(std::move(out));
}

Restriction restrict(const ParticleMeasure& mu, const Region& region) {
  std::vector<std::size_t> in, out;
  for (std::size_t i = 0; i < mu.size(); ++i)
    (region.contains(mu.position(i)) ? in : out).push_back(i);
  return {mu.subset(in), mu.subset(out)};
}

ParticleMeasure merge_coincident(const ParticleMeasure& mu) {
  std::map<std::vector<double>, std::size_t> slot;
  std::vector<double> pos, w;
  std::vector<int> tags;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    auto p = mu.position(i);
    std::vector<double> key(p.begin(), p.end());
    auto [it, fresh] = slot.emplace(key, w.size());
    if (fresh) {
      pos.insert(pos.end(), p.begin(), p.end());
      w.push_back(mu.weight(i));
      if (mu.has_tags()) tags.push_back(mu.tag(i));
    } else {
      w[it->second] += mu.weight(i);
    }
  }
  return ParticleMeasure(mu.dim(), std::move(pos), std::move(w), std::move(tags));
}

}  // namespace ctrans
