#include "ctrans/field.hpp"

#include "ctrans/errors.hpp"

#include <algorithm>
#include <cmath>

namespace ctrans {

struct TimeField::State {
  int dim = 0;
  Eval eval;
  FieldMeta meta;
  std::vector<FieldPiece> pieces;
};

TimeField::TimeField(int dim, Eval eval, FieldMeta meta) {
  if (dim <= 0) throw InputError("TimeField: dimension must be positive");
  auto s = std::make_shared<State>();
  s->dim = dim;
  s->eval = std::move(eval);
  s->meta = std::move(meta);
  state_ = std::move(s);
}

TimeField TimeField::piecewise(int dim, std::vector<FieldPiece> pieces, nlohmann::json descriptor) {
  if (pieces.empty()) throw InputError("TimeField::piecewise: no pieces");
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (!pieces[i].field || pieces[i].field->dim() != dim)
      throw InputError("TimeField::piecewise: piece dimension mismatch");
    if (!(pieces[i].t_end >= pieces[i].t_start))
      throw InputError("TimeField::piecewise: reversed piece");
    if (i > 0 && pieces[i].t_start != pieces[i - 1].t_end)
      throw InputError("TimeField::piecewise: pieces are not contiguous");
  }
  FieldMeta meta;
  meta.autonomous = false;
  meta.t_begin = pieces.front().t_start;
  meta.t_end = pieces.back().t_end;
  for (const auto& p : pieces) {
    meta.lipschitz = std::max(meta.lipschitz, p.field->lipschitz());
    meta.sup_bound = std::max(meta.sup_bound, p.field->sup_bound());
    meta.non_lipschitz = meta.non_lipschitz || p.field->meta().non_lipschitz;
  }
  meta.descriptor = descriptor.is_null() ? nlohmann::json{{"kind", "piecewise"}} : std::move(descriptor);

  auto s = std::make_shared<State>();
  s->dim = dim;
  s->meta = std::move(meta);
  s->pieces = std::move(pieces);
  const State* raw = s.get();
  s->eval = [raw](std::span<const double> x, double t, std::span<double> out) {
    const auto& ps = raw->pieces;
    // Right-continuous: the last piece with t_start <= t.
    auto it = std::upper_bound(ps.begin(), ps.end(), t,
                               [](double v, const FieldPiece& p) { return v < p.t_start; });
    const FieldPiece& p = it == ps.begin() ? ps.front() : *(it - 1);
    p.field->evaluate(x, t, out);
  };
  TimeField f;
  f.state_ = std::move(s);
  return f;
}

int TimeField::dim() const { return state_ ? state_->dim : 0; }

void TimeField::evaluate(std::span<const double> x, double t, std::span<double> out) const {
  state_->eval(x, t, out);
}

std::vector<double> TimeField::at(std::span<const double> x, double t) const {
  std::vector<double> out(static_cast<std::size_t>(dim()));
  evaluate(x, t, out);
  return out;
}

const FieldMeta& TimeField::meta() const {
  static const FieldMeta none;
  return state_ ? state_->meta : none;
}

bool TimeField::is_piecewise() const { return state_ && !state_->pieces.empty(); }

const std::vector<FieldPiece>& TimeField::pieces() const { return state_->pieces; }

TimeField zero_field(int dim) {
  FieldMeta m;
  m.descriptor = {{"kind", "zero"}, {"dim", dim}};
  return TimeField(dim, [](std::span<const double>, double, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
  }, m);
}

TimeField constant_field(std::vector<double> c) {
  const int d = static_cast<int>(c.size());
  FieldMeta m;
  double n2 = 0.0;
  for (double v : c) n2 += v * v;
  m.sup_bound = std::sqrt(n2);
  m.descriptor = {{"kind", "constant"}, {"value", c}};
  return TimeField(d, [c](std::span<const double>, double, std::span<double> out) {
    std::copy(c.begin(), c.end(), out.begin());
  }, m);
}

TimeField affine_field(std::vector<double> a, std::vector<double> b) {
  const int d = static_cast<int>(b.size());
  if (a.size() != b.size() * b.size()) throw InputError("affine_field: matrix must be d x d");
  FieldMeta m;
  // Frobenius norm bounds the operator norm.
  double fro = 0.0;
  for (double v : a) fro += v * v;
  m.lipschitz = std::sqrt(fro);
  m.sup_bound = std::numeric_limits<double>::infinity();
  m.descriptor = {{"kind", "affine"}, {"matrix", a}, {"offset", b}};
  return TimeField(d, [a, b, d](std::span<const double> x, double, std::span<double> out) {
    for (int i = 0; i < d; ++i) {
      double s = b[i];
      for (int j = 0; j < d; ++j) s += a[i * d + j] * x[j];
      out[i] = s;
    }
  }, m);
}

TimeField sqrt_field() {
  FieldMeta m;
  m.non_lipschitz = true;
  m.sup_bound = std::numeric_limits<double>::infinity();
  m.descriptor = {{"kind", "sqrt"}};
  return TimeField(1, [](std::span<const double> x, double, std::span<double> out) {
    out[0] = x[0] > 0.0 ? std::sqrt(x[0]) : 0.0;
  }, m);
}

TimeField add(const TimeField& a, const TimeField& b) {
  if (a.dim() != b.dim()) throw InputError("add: dimension mismatch");
  FieldMeta m;
  m.lipschitz = a.lipschitz() + b.lipschitz();
  m.sup_bound = a.sup_bound() + b.sup_bound();
  m.non_lipschitz = a.meta().non_lipschitz || b.meta().non_lipschitz;
  m.autonomous = a.meta().autonomous && b.meta().autonomous;
  m.t_begin = std::max(a.meta().t_begin, b.meta().t_begin);
  m.t_end = std::min(a.meta().t_end, b.meta().t_end);
  m.descriptor = {{"kind", "sum"}, {"terms", {a.descriptor(), b.descriptor()}}};
  const int d = a.dim();
  return TimeField(d, [a, b, d](std::span<const double> x, double t, std::span<double> out) {
    double tmp[8];
    std::vector<double> heap;
    double* buf = tmp;
    if (d > 8) {
      heap.resize(d);
      buf = heap.data();
    }
    a.evaluate(x, t, out);
    b.evaluate(x, t, std::span<double>(buf, d));
    for (int i = 0; i < d; ++i) out[i] += buf[i];
  }, m);
}

TimeField scale(const TimeField& a, double factor) {
  FieldMeta m = a.meta();
  m.lipschitz *= std::abs(factor);
  m.sup_bound *= std::abs(factor);
  m.support.reset();
  if (a.meta().support && factor != 0.0) m.support = a.meta().support;
  m.descriptor = {{"kind", "scaled"}, {"factor", factor}, {"field", a.descriptor()}};
  return TimeField(a.dim(), [a, factor](std::span<const double> x, double t, std::span<double> out) {
    a.evaluate(x, t, out);
    for (double& v : out) v *= factor;
  }, m);
}

TimeField time_reversed(const TimeField& a, double total) {
  if (a.is_piecewise()) {
    std::vector<FieldPiece> rev;
    const auto& ps = a.pieces();
    for (auto it = ps.rbegin(); it != ps.rend(); ++it)
      rev.push_back({total - it->t_end, total - it->t_start,
                     std::make_shared<const TimeField>(time_reversed(*it->field, total))});
    return TimeField::piecewise(a.dim(), std::move(rev),
                                {{"kind", "time_reversed"}, {"total", total}, {"field", a.descriptor()}});
  }
  FieldMeta m = a.meta();
  m.t_begin = total - a.meta().t_end;
  m.t_end = total - a.meta().t_begin;
  m.descriptor = {{"kind", "time_reversed"}, {"total", total}, {"field", a.descriptor()}};
  return TimeField(a.dim(), [a, total](std::span<const double> x, double t, std::span<double> out) {
    a.evaluate(x, total - t, out);
    for (double& v : out) v = -v;
  }, m);
}

TimeField time_shifted(const TimeField& a, double offset) {
  if (a.is_piecewise()) {
    std::vector<FieldPiece> sh;
    for (const auto& p : a.pieces())
      sh.push_back({p.t_start + offset, p.t_end + offset,
                    std::make_shared<const TimeField>(time_shifted(*p.field, offset))});
    return TimeField::piecewise(a.dim(), std::move(sh),
                                {{"kind", "time_shifted"}, {"offset", offset}, {"field", a.descriptor()}});
  }
  if (a.meta().autonomous) return a;
  FieldMeta m = a.meta();
  m.t_begin += offset;
  m.t_end += offset;
  m.descriptor = {{"kind", "time_shifted"}, {"offset", offset}, {"field", a.descriptor()}};
  return TimeField(a.dim(), [a, offset](std::span<const double> x, double t, std::span<double> out) {
    a.evaluate(x, t - offset, out);
  }, m);
}

}  // namespace ctrans
