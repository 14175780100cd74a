#include "ctrans/integrate.hpp"

#include "ctrans/errors.hpp"
#include "ctrans/parallel.hpp"
#include "ctrans/text.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ctrans {

namespace {

struct Leg {
  double a, b;
  const TimeField* field;
};

// Splits [t0, t1] at piece boundaries (in travel order) down to leaf fields.
void legs(const TimeField& f, double t0, double t1, std::vector<Leg>& out) {
  if (!f.is_piecewise()) {
    if (t0 != t1) out.push_back({t0, t1, &f});
    return;
  }
  const auto& ps = f.pieces();
  const double lo = std::min(t0, t1), hi = std::max(t0, t1);
  std::vector<Leg> fwd;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const double s = i == 0 ? -INFINITY : ps[i].t_start;
    const double e = i + 1 == ps.size() ? INFINITY : ps[i].t_end;
    const double a = std::max(lo, s), b = std::min(hi, e);
    if (a < b) fwd.push_back({a, b, ps[i].field.get()});
  }
  if (t1 < t0) {
    std::reverse(fwd.begin(), fwd.end());
    for (auto& l : fwd) std::swap(l.a, l.b);
  }
  for (const auto& l : fwd) legs(*l.field, l.a, l.b, out);
}

std::string describe(std::span<const double> x, double t) {
  std::string s = "(";
  for (std::size_t i = 0; i < x.size(); ++i) s += (i ? ", " : "") + format_double(x[i]);
  return s + ") at t=" + format_double(t);
}

class Stepper {
 public:
  explicit Stepper(int d) : d_(d), k_(5 * d) {}

  // One classical RK4 step of size h from (x, t), in place.
  void step(const TimeField& f, std::span<double> x, double t, double h) {
    double* k1 = k_.data();
    double* k2 = k1 + d_;
    double* k3 = k2 + d_;
    double* k4 = k3 + d_;
    double* y = k4 + d_;
    auto eval = [&](const double* at, double tt, double* out) {
      f.evaluate(std::span<const double>(at, d_), tt, std::span<double>(out, d_));
      for (int i = 0; i < d_; ++i)
        if (!std::isfinite(out[i]))
          throw NumericalError("non-finite velocity at " + describe(std::span<const double>(at, d_), tt));
    };
    eval(x.data(), t, k1);
    for (int i = 0; i < d_; ++i) y[i] = x[i] + 0.5 * h * k1[i];
    eval(y, t + 0.5 * h, k2);
    for (int i = 0; i < d_; ++i) y[i] = x[i] + 0.5 * h * k2[i];
    eval(y, t + 0.5 * h, k3);
    for (int i = 0; i < d_; ++i) y[i] = x[i] + h * k3[i];
    eval(y, t + h, k4);
    for (int i = 0; i < d_; ++i) x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }

 private:
  int d_;
  std::vector<double> k_;
};

std::size_t step_count(const TimeField& f, double a, double b, double tol) {
  return static_cast<std::size_t>(std::max(1.0, std::ceil(std::abs(b - a) / rk4_step(f, tol))));
}

}  // namespace

double rk4_step(const TimeField& field, double tol) {
  if (!(tol > 0.0)) throw InputError("integrator tolerance must be positive");
  return std::min(std::pow(tol, 0.25), 0.1 / std::max(field.lipschitz(), 1.0));
}

std::vector<double> integrate_flow(const TimeField& field, std::span<const double> x0, double t0,
                                   double t1, double tol) {
  if (static_cast<int>(x0.size()) != field.dim()) throw InputError("integrate_flow: dimension mismatch");
  std::vector<double> x(x0.begin(), x0.end());
  std::vector<Leg> ls;
  legs(field, t0, t1, ls);
  Stepper st(field.dim());
  for (const auto& l : ls) {
    const std::size_t n = step_count(*l.field, l.a, l.b, tol);
    const double h = (l.b - l.a) / static_cast<double>(n);
    for (std::size_t s = 0; s < n; ++s) st.step(*l.field, x, l.a + static_cast<double>(s) * h, h);
  }
  return x;
}

ParticleMeasure flow_push(const TimeField& field, const ParticleMeasure& mu, double t0, double t1,
                          double tol) {
  if (t0 == t1 || mu.is_empty()) return mu;
  const int d = mu.dim();
  std::vector<double> pos(mu.positions().size());
  parallel_for(mu.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const auto y = integrate_flow(field, mu.position(i), t0, t1, tol);
      std::copy(y.begin(), y.end(), pos.begin() + static_cast<std::ptrdiff_t>(i * d));
    }
  });
  return mu.with_positions(std::move(pos));
}

StoppedPoint stopped_flow(const TimeField& field, const Region& stop_region,
                          std::span<const double> x0, double t0, double horizon, double tol) {
  if (!(horizon > 0.0)) throw InputError("stopped_flow: horizon must be positive");
  StoppedPoint res{std::vector<double>(x0.begin(), x0.end()), std::nullopt};
  if (stop_region.contains_closure(x0)) {
    res.hit_time = 0.0;
    return res;
  }
  const int d = field.dim();
  std::vector<Leg> ls;
  legs(field, t0, t0 + horizon, ls);
  Stepper st(d);
  std::vector<double> x = res.endpoint, trial(d), lo_pt(d);
  for (const auto& l : ls) {
    const std::size_t n = step_count(*l.field, l.a, l.b, tol);
    const double h = (l.b - l.a) / static_cast<double>(n);
    for (std::size_t s = 0; s < n; ++s) {
      const double t = l.a + static_cast<double>(s) * h;
      trial = x;
      st.step(*l.field, trial, t, h);
      if (!stop_region.contains_closure(trial)) {
        x = trial;
        continue;
      }
      // Bisect the sub-step length: lo stays outside, hi is inside.
      double lo = 0.0, hi = h;
      std::vector<double> hi_pt = trial;
      for (int it = 0; it < 40; ++it) {
        const double mid = 0.5 * (lo + hi);
        lo_pt = x;
        st.step(*l.field, lo_pt, t, mid);
        if (stop_region.contains_closure(lo_pt)) {
          hi = mid;
          hi_pt = lo_pt;
        } else {
          lo = mid;
        }
      }
      res.endpoint = hi_pt;
      res.hit_time = t + hi - t0;
      return res;
    }
  }
  res.endpoint = x;
  return res;
}

}  // namespace ctrans
