#pragma once

#include "ctrans/region.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace ctrans {

// Weighted point cloud. Positions are stored row-major (particle-major), so
// particle i occupies positions()[i*dim .. i*dim+dim).
class ParticleMeasure {
 public:
  ParticleMeasure() = default;
  // Validates: dim > 0, sizes agree, weights > 0 and finite, coordinates finite.
  ParticleMeasure(int dim, std::vector<double> positions, std::vector<double> weights,
                  std::vector<int> tags = {});

  static ParticleMeasure empty(int dim);
  // Equal weights 1/count (or total/count).
  static ParticleMeasure uniform_weights(int dim, std::vector<double> positions,
                                         double total = 1.0);

  int dim() const { return dim_; }
  std::size_t size() const { return weights_.size(); }
  bool is_empty() const { return weights_.empty(); }

  std::span<const double> position(std::size_t i) const {
    return {positions_.data() + i * static_cast<std::size_t>(dim_),
            static_cast<std::size_t>(dim_)};
  }
  double coord(std::size_t i, int axis) const { return positions_[i * dim_ + axis]; }
  double weight(std::size_t i) const { return weights_[i]; }
  int tag(std::size_t i) const { return tags_.empty() ? 0 : tags_[i]; }

  const std::vector<double>& positions() const { return positions_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<int>& tags() const { return tags_; }
  bool has_tags() const { return !tags_.empty(); }

  double total_mass() const;
  double max_weight() const;
  Box support_bbox() const;

  ParticleMeasure scaled(double factor) const;
  ParticleMeasure with_positions(std::vector<double> positions) const;
  ParticleMeasure with_tags(std::vector<int> tags) const;
  ParticleMeasure subset(std::span<const std::size_t> indices) const;
  // Disjoint sum mu + rho.
  ParticleMeasure concat(const ParticleMeasure& other) const;
  // Particles whose tag equals (or differs from) the given label.
  ParticleMeasure select_tag(int tag, bool equal = true) const;

  bool operator==(const ParticleMeasure& other) const = default;

 private:
  int dim_ = 0;
  std::vector<double> positions_;
  std::vector<double> weights_;
  std::vector<int> tags_;
};

using PointMap = std::function<void(std::span<const double> x, std::span<double> out)>;

// Maps every particle; weights and tags are kept. Throws NumericalError naming
// the first particle whose image is not finite.
ParticleMeasure push_forward(const ParticleMeasure& mu, const PointMap& map);

struct Restriction {
  ParticleMeasure inside;
  ParticleMeasure outside;
};

Restriction restrict(const ParticleMeasure& mu, const Region& region);

// Merges atoms at identical positions, summing weights; the first tag wins.
ParticleMeasure merge_coincident(const ParticleMeasure& mu);

}  // namespace ctrans
