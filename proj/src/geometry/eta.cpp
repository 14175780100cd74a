#include "ctrans/errors.hpp"
#include "ctrans/geometry.hpp"
#include "ctrans/text.hpp"

#include <algorithm>
#include <cmath>

namespace ctrans {

namespace {

std::vector<double> centre_of(const Region& r) {
  const auto& part = r.parts().front();
  if (const auto* b = std::get_if<Box>(&part)) {
    std::vector<double> c(b->lo.size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = 0.5 * (b->lo[i] + b->hi[i]);
    return c;
  }
  return std::get<Ball>(part).center;
}

// (R^2 - |y|^2) exp(<lambda, y>), y = x - c. The single critical point sits
// on the ray from c towards the peak when |lambda| = 2s / (R^2 - s^2).
ScalarField ball_profile(const Ball& ball, const std::vector<double>& peak) {
  const std::size_t d = ball.center.size();
  std::vector<double> lambda(d, 0.0);
  double s2 = 0.0;
  for (std::size_t i = 0; i < d; ++i) s2 += (peak[i] - ball.center[i]) * (peak[i] - ball.center[i]);
  const double s = std::sqrt(s2);
  const double r2 = ball.radius * ball.radius;
  if (s > 0.0)
    for (std::size_t i = 0; i < d; ++i) lambda[i] = 2.0 / (r2 - s2) * (peak[i] - ball.center[i]);
  ScalarField f;
  f.note = s > 0.0 ? "ball profile tilted towards the peak" : "concentric ball profile";
  f.value = [ball, lambda, r2](std::span<const double> x) {
    double y2 = 0.0, dot = 0.0;
    for (std::size_t i = 0; i < lambda.size(); ++i) {
      const double y = x[i] - ball.center[i];
      y2 += y * y;
      dot += lambda[i] * y;
    }
    return (r2 - y2) * std::exp(dot);
  };
  f.gradient = [ball, lambda, r2](std::span<const double> x, std::span<double> g) {
    double y2 = 0.0, dot = 0.0;
    for (std::size_t i = 0; i < lambda.size(); ++i) {
      const double y = x[i] - ball.center[i];
      y2 += y * y;
      dot += lambda[i] * y;
    }
    const double e = std::exp(dot);
    for (std::size_t i = 0; i < lambda.size(); ++i)
      g[i] = e * (-2.0 * (x[i] - ball.center[i]) + (r2 - y2) * lambda[i]);
  };
  return f;
}

// prod_i (x_i - l_i)(h_i - x_i) exp(lambda_i (x_i - m_i)); each factor peaks
// at the requested coordinate.
ScalarField box_profile(const Box& box, const std::vector<double>& peak) {
  const std::size_t d = box.lo.size();
  std::vector<double> lambda(d), mid(d);
  for (std::size_t i = 0; i < d; ++i) {
    const double l = box.lo[i], h = box.hi[i], p = peak[i];
    lambda[i] = (2.0 * p - h - l) / ((p - l) * (h - p));
    mid[i] = 0.5 * (l + h);
  }
  auto factor = [box, lambda, mid](std::size_t i, double x, double* deriv) {
    const double l = box.lo[i], h = box.hi[i];
    const double e = std::exp(lambda[i] * (x - mid[i]));
    if (deriv) *deriv = e * ((h + l - 2.0 * x) + lambda[i] * (x - l) * (h - x));
    return (x - l) * (h - x) * e;
  };
  ScalarField f;
  f.note = "tensor box profile";
  f.value = [factor, d](std::span<const double> x) {
    double v = 1.0;
    for (std::size_t i = 0; i < d; ++i) v *= factor(i, x[i], nullptr);
    return v;
  };
  f.gradient = [factor, d](std::span<const double> x, std::span<double> g) {
    double vals[8], ders[8];
    for (std::size_t i = 0; i < d; ++i) vals[i] = factor(i, x[i], &ders[i]);
    for (std::size_t i = 0; i < d; ++i) {
      double v = ders[i];
      for (std::size_t j = 0; j < d; ++j)
        if (j != i) v *= vals[j];
      g[i] = v;
    }
  };
  return f;
}

}  // namespace

EtaResult weight_eta(const Region& omega1, const Region& s0, std::size_t samples_per_axis) {
  if (omega1.parts().size() != 1 || s0.parts().size() != 1)
    throw InputError("weight_eta: omega1 and s0 must be single boxes or balls");
  const int d = omega1.dim();
  if (d > 8) throw InputError("weight_eta: dimension above 8 is not supported");
  const Box s0_box = s0.bounding_box();
  if (!omega1.contains_box(s0_box))
    throw InputError("weight_eta: s0 is not compactly inside omega1");
  const std::vector<double> peak = centre_of(s0);
  if (!omega1.contains(peak)) throw InputError("weight_eta: s0 centre outside omega1");

  EtaResult res;
  res.peak = peak;
  double layer = 0.0;
  const auto& part = omega1.parts().front();
  if (const auto* b = std::get_if<Box>(&part)) {
    res.eta = box_profile(*b, peak);
    double ext = INFINITY;
    for (int i = 0; i < d; ++i) ext = std::min(ext, b->hi[i] - b->lo[i]);
    layer = 0.02 * ext;
  } else {
    res.eta = ball_profile(std::get<Ball>(part), peak);
  }
  res.sup = res.eta.value(peak);

  const Box bb = omega1.bounding_box();
  const Region certified = layer > 0.0 ? omega1.shrink(layer) : omega1;
  const std::size_t m = std::max<std::size_t>(samples_per_axis, 2);
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) total *= m;
  res.kappa0 = INFINITY;
  double g[8], gp[8], gm[8], x[8], xp[8];
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t r = idx;
    for (int i = 0; i < d; ++i) {
      const double u = (static_cast<double>(r % m) + 0.5) / static_cast<double>(m);
      r /= m;
      x[i] = bb.lo[i] + u * (bb.hi[i] - bb.lo[i]);
    }
    std::span<const double> xs(x, d);
    if (!omega1.contains(xs)) continue;
    res.eta.gradient(xs, std::span<double>(g, d));
    double n2 = 0.0;
    for (int i = 0; i < d; ++i) n2 += g[i] * g[i];
    const double norm = std::sqrt(n2);
    res.kappa1 = std::max(res.kappa1, norm);
    // Lipschitz constant of the gradient by central differences.
    const double h = 1e-5 * std::max(1.0, std::abs(bb.hi[0] - bb.lo[0]));
    double fro = 0.0;
    for (int a = 0; a < d; ++a) {
      std::copy(x, x + d, xp);
      xp[a] = x[a] + h;
      res.eta.gradient(std::span<const double>(xp, d), std::span<double>(gp, d));
      xp[a] = x[a] - h;
      res.eta.gradient(std::span<const double>(xp, d), std::span<double>(gm, d));
      for (int i = 0; i < d; ++i) fro += std::pow((gp[i] - gm[i]) / (2.0 * h), 2);
    }
    res.hessian_bound = std::max(res.hessian_bound, std::sqrt(fro));
    if (s0.contains_closure(xs) || !certified.contains(xs)) continue;
    if (norm < 1e-6) {
      std::string where;
      for (int i = 0; i < d; ++i) where += (i ? ", " : "") + format_double(x[i]);
      throw InputError("weight_eta: critical point detected near (" + where + ")");
    }
    res.kappa0 = std::min(res.kappa0, norm);
  }
  if (!std::isfinite(res.kappa0)) res.kappa0 = 0.0;
  res.hessian_bound *= 1.1;
  res.kappa1 *= 1.0 + 1.0 / static_cast<double>(m);
  // Concentric balls: |grad eta| = 2|x - c| exactly.
  if (const auto* outer = std::get_if<Ball>(&part)) {
    if (const auto* inner = std::get_if<Ball>(&s0.parts().front()); inner && inner->center == outer->center) {
      res.kappa0 = 2.0 * inner->radius;
      res.kappa1 = 2.0 * outer->radius;
    }
  }
  return res;
}

}  // namespace ctrans
