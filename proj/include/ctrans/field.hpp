#pragma once

#include "ctrans/region.hpp"

#include <json.hpp>

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace ctrans {

struct FieldMeta {
  double lipschitz = 0.0;  // spatial Lipschitz constant, possibly conservative
  double sup_bound = 0.0;
  bool non_lipschitz = false;  // e.g. the square-root field; integrated with a warning flag
  bool autonomous = true;
  std::optional<Region> support;  // field vanishes outside, when set
  double t_begin = -std::numeric_limits<double>::infinity();
  double t_end = std::numeric_limits<double>::infinity();
  nlohmann::json descriptor = nlohmann::json::object();
};

class TimeField;

struct FieldPiece {
  double t_start = 0.0;
  double t_end = 0.0;
  std::shared_ptr<const TimeField> field;
};

// Velocity field w(x, t). Cheap to copy; evaluation is reentrant.
class TimeField {
 public:
  using Eval = std::function<void(std::span<const double> x, double t, std::span<double> out)>;

  TimeField() = default;
  TimeField(int dim, Eval eval, FieldMeta meta);
  // Right-continuous concatenation in time; pieces must be contiguous.
  static TimeField piecewise(int dim, std::vector<FieldPiece> pieces, nlohmann::json descriptor = {});

  int dim() const;
  bool valid() const { return state_ != nullptr; }
  void evaluate(std::span<const double> x, double t, std::span<double> out) const;
  std::vector<double> at(std::span<const double> x, double t) const;

  const FieldMeta& meta() const;
  double lipschitz() const { return meta().lipschitz; }
  double sup_bound() const { return meta().sup_bound; }
  const nlohmann::json& descriptor() const { return meta().descriptor; }

  bool is_piecewise() const;
  const std::vector<FieldPiece>& pieces() const;

 private:
  struct State;
  std::shared_ptr<const State> state_;
};

TimeField zero_field(int dim);
TimeField constant_field(std::vector<double> c);
// w(x) = A x + b with A row-major d x d.
TimeField affine_field(std::vector<double> a, std::vector<double> b);
// x' = sqrt(x) for x > 0 and 0 otherwise (one dimension).
TimeField sqrt_field();

TimeField add(const TimeField& a, const TimeField& b);
TimeField scale(const TimeField& a, double factor);
// w(x, t) = -a(x, total - t): running w forward over [0, total] retraces a
// backward from time total to 0. Piece boundaries are carried over.
TimeField time_reversed(const TimeField& a, double total);
// w(x, t) = a(x, t - offset).
TimeField time_shifted(const TimeField& a, double offset);

}  // namespace ctrans
