#include "ctrans/density.hpp"

#include "ctrans/errors.hpp"
#include "ctrans/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ctrans {

namespace {

constexpr const char* kUniform = "uniform-on-box";
constexpr const char* kGaussian = "gaussian-truncated";
constexpr const char* kMixture = "mixture";
constexpr const char* kProfile = "indicator-with-density-profile";

double box_volume(const Box& b) {
  double v = 1.0;
  for (std::size_t i = 0; i < b.lo.size(); ++i) v *= b.hi[i] - b.lo[i];
  return v;
}

bool in_box(const Box& b, std::span<const double> x) {
  for (std::size_t i = 0; i < b.lo.size(); ++i)
    if (!(x[i] > b.lo[i] && x[i] < b.hi[i])) return false;
  return true;
}

// Lower regularized incomplete gamma P(a, x), series expansion.
double gamma_p(double a, double x) {
  if (x <= 0.0) return 0.0;
  double term = 1.0 / a, sum = term;
  for (int n = 1; n < 500; ++n) {
    term *= x / (a + n);
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Probability that an untruncated gaussian falls inside the truncation ball.
double gaussian_ball_mass(int dim, double sigma, double radius) {
  const double x = radius * radius / (2.0 * sigma * sigma);
  if (dim == 1) return std::erf(radius / (sigma * std::sqrt(2.0)));
  if (dim == 2) return -std::expm1(-x);
  return gamma_p(0.5 * dim, x);
}

double profile_value(const DensitySpec& s, std::span<const double> x) {
  double v = 1.0;
  for (int i = 0; i < s.dim; ++i) v += s.gradient[i] * (x[i] - 0.5 * (s.box.lo[i] + s.box.hi[i]));
  return v;
}

void draw(const DensitySpec& s, Rng& rng, std::span<double> out) {
  if (s.kind == kUniform) {
    for (int i = 0; i < s.dim; ++i) out[i] = rng.uniform(s.box.lo[i], s.box.hi[i]);
  } else if (s.kind == kGaussian) {
    for (;;) {
      double r2 = 0.0;
      for (int i = 0; i < s.dim; ++i) {
        const double z = rng.normal() * s.sigma;
        out[i] = s.mean[i] + z;
        r2 += z * z;
      }
      if (r2 < s.radius * s.radius) return;
    }
  } else if (s.kind == kMixture) {
    const double total = std::accumulate(s.mixture_weights.begin(), s.mixture_weights.end(), 0.0);
    const double u = rng.uniform() * total;
    double acc = 0.0;
    std::size_t k = 0;
    for (; k + 1 < s.components.size(); ++k) {
      acc += s.mixture_weights[k];
      if (u < acc) break;
    }
    draw(s.components[k], rng, out);
  } else {
    // Rejection against the largest corner value of the affine profile.
    double peak = 1.0;
    for (int i = 0; i < s.dim; ++i) peak += std::abs(s.gradient[i]) * 0.5 * (s.box.hi[i] - s.box.lo[i]);
    for (;;) {
      for (int i = 0; i < s.dim; ++i) out[i] = rng.uniform(s.box.lo[i], s.box.hi[i]);
      if (rng.uniform() * peak < profile_value(s, out)) return;
    }
  }
}

std::vector<double> get_vec(const nlohmann::json& j, const char* key, const std::string& kind) {
  if (!j.contains(key)) throw InputError(kind + ": missing field '" + key + "'");
  try {
    return j.at(key).get<std::vector<double>>();
  } catch (const nlohmann::json::exception&) {
    throw InputError(kind + ": field '" + key + "' must be a number array");
  }
}

double get_num(const nlohmann::json& j, const char* key, const std::string& kind) {
  if (!j.contains(key) || !j.at(key).is_number())
    throw InputError(kind + ": missing numeric field '" + key + "'");
  return j.at(key).get<double>();
}

}  // namespace

DensitySpec DensitySpec::uniform_box(Box box) {
  DensitySpec s;
  s.kind = kUniform;
  s.dim = static_cast<int>(box.lo.size());
  s.box = std::move(box);
  s.validate();
  return s;
}

DensitySpec DensitySpec::gaussian(std::vector<double> mean, double sigma, double radius) {
  DensitySpec s;
  s.kind = kGaussian;
  s.dim = static_cast<int>(mean.size());
  s.mean = std::move(mean);
  s.sigma = sigma;
  s.radius = radius;
  s.validate();
  return s;
}

DensitySpec DensitySpec::mixture(std::vector<double> weights, std::vector<DensitySpec> parts) {
  DensitySpec s;
  s.kind = kMixture;
  s.dim = parts.empty() ? 0 : parts.front().dim;
  s.mixture_weights = std::move(weights);
  s.components = std::move(parts);
  s.validate();
  return s;
}

DensitySpec DensitySpec::profile(Box box, std::vector<double> gradient) {
  DensitySpec s;
  s.kind = kProfile;
  s.dim = static_cast<int>(box.lo.size());
  s.box = std::move(box);
  s.gradient = std::move(gradient);
  s.validate();
  return s;
}

void DensitySpec::validate() const {
  if (dim <= 0) throw InputError("density: dimension must be positive");
  if (kind == kUniform || kind == kProfile) {
    Region check{Box(box)};
    if (check.dim() != dim) throw InputError("density: box dimension mismatch");
    if (kind == kProfile) {
      if (static_cast<int>(gradient.size()) != dim)
        throw InputError("density profile: gradient length must equal dim");
      double low = 1.0;
      for (int i = 0; i < dim; ++i) low -= std::abs(gradient[i]) * 0.5 * (box.hi[i] - box.lo[i]);
      if (!(low > 0.0)) throw InputError("density profile: density must stay positive on the box");
    }
  } else if (kind == kGaussian) {
    if (static_cast<int>(mean.size()) != dim) throw InputError("gaussian: mean length must equal dim");
    for (double m : mean)
      if (!std::isfinite(m)) throw InputError("gaussian: non-finite mean");
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InputError("gaussian: sigma must be positive");
    if (!(radius > 0.0) || !std::isfinite(radius))
      throw InputError("gaussian: unbounded support, a finite truncation radius is required");
  } else if (kind == kMixture) {
    if (components.empty() || components.size() != mixture_weights.size())
      throw InputError("mixture: need one weight per component");
    double total = 0.0;
    for (double w : mixture_weights) {
      if (!(w >= 0.0) || !std::isfinite(w)) throw InputError("mixture: weights must be nonnegative");
      total += w;
    }
    if (!(total > 0.0)) throw InputError("mixture: weights sum to zero, cannot normalize");
    for (const auto& c : components) {
      if (c.dim != dim) throw InputError("mixture: components of different dimension");
      c.validate();
    }
  } else {
    throw InputError("density: unknown kind '" + kind + "'");
  }
}

Box DensitySpec::support_bbox() const {
  if (kind == kUniform || kind == kProfile) return box;
  if (kind == kGaussian) {
    Box b{mean, mean};
    for (int i = 0; i < dim; ++i) {
      b.lo[i] -= radius;
      b.hi[i] += radius;
    }
    return b;
  }
  Box b = components.front().support_bbox();
  for (const auto& c : components) {
    Box o = c.support_bbox();
    for (int i = 0; i < dim; ++i) {
      b.lo[i] = std::min(b.lo[i], o.lo[i]);
      b.hi[i] = std::max(b.hi[i], o.hi[i]);
    }
  }
  return b;
}

double DensitySpec::density(std::span<const double> x) const {
  if (kind == kUniform) return in_box(box, x) ? 1.0 / box_volume(box) : 0.0;
  if (kind == kProfile) return in_box(box, x) ? profile_value(*this, x) / box_volume(box) : 0.0;
  if (kind == kGaussian) {
    double r2 = 0.0;
    for (int i = 0; i < dim; ++i) r2 += (x[i] - mean[i]) * (x[i] - mean[i]);
    if (r2 >= radius * radius) return 0.0;
    const double norm = std::pow(2.0 * M_PI * sigma * sigma, 0.5 * dim) *
                        gaussian_ball_mass(dim, sigma, radius);
    return std::exp(-r2 / (2.0 * sigma * sigma)) / norm;
  }
  const double total = std::accumulate(mixture_weights.begin(), mixture_weights.end(), 0.0);
  double v = 0.0;
  for (std::size_t k = 0; k < components.size(); ++k)
    v += mixture_weights[k] / total * components[k].density(x);
  return v;
}

nlohmann::json DensitySpec::to_json() const {
  nlohmann::json j{{"kind", kind}};
  if (kind == kUniform || kind == kProfile) {
    j["lo"] = box.lo;
    j["hi"] = box.hi;
    if (kind == kProfile) j["gradient"] = gradient;
  } else if (kind == kGaussian) {
    j["mean"] = mean;
    j["sigma"] = sigma;
    j["radius"] = radius;
  } else {
    j["weights"] = mixture_weights;
    nlohmann::json parts = nlohmann::json::array();
    for (const auto& c : components) parts.push_back(c.to_json());
    j["components"] = parts;
  }
  return j;
}

DensitySpec DensitySpec::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
    throw InputError("density: expected an object with a string 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == kUniform) return uniform_box(Box{get_vec(j, "lo", kind), get_vec(j, "hi", kind)});
  if (kind == kProfile)
    return profile(Box{get_vec(j, "lo", kind), get_vec(j, "hi", kind)}, get_vec(j, "gradient", kind));
  if (kind == kGaussian) {
    if (!j.contains("radius"))
      throw InputError("gaussian-truncated: unbounded support, field 'radius' is required");
    return gaussian(get_vec(j, "mean", kind), get_num(j, "sigma", kind), get_num(j, "radius", kind));
  }
  if (kind == kMixture) {
    if (!j.contains("components") || !j.at("components").is_array())
      throw InputError("mixture: missing array 'components'");
    std::vector<DensitySpec> parts;
    for (const auto& c : j.at("components")) parts.push_back(from_json(c));
    return mixture(get_vec(j, "weights", kind), std::move(parts));
  }
  throw InputError("density: unknown kind '" + kind + "'");
}

ParticleMeasure sample(const DensitySpec& spec, std::size_t count, std::uint64_t seed) {
  spec.validate();
  if (count == 0) throw InputError("sample: count must be at least 1");
  Rng rng(seed);
  std::vector<double> pos(count * spec.dim);
  for (std::size_t i = 0; i < count; ++i)
    draw(spec, rng, std::span<double>(pos.data() + i * spec.dim, spec.dim));
  return ParticleMeasure::uniform_weights(spec.dim, std::move(pos));
}

double cdf_1d(const DensitySpec& s, double x) {
  if (s.dim != 1) throw InputError("cdf_1d: one-dimensional spec required");
  if (s.kind == kUniform) return std::clamp((x - s.box.lo[0]) / (s.box.hi[0] - s.box.lo[0]), 0.0, 1.0);
  if (s.kind == kProfile) {
    const double lo = s.box.lo[0], hi = s.box.hi[0];
    const double xc = std::clamp(x, lo, hi);
    const double c = 0.5 * (lo + hi), g = s.gradient[0];
    const double u = xc - c, u0 = lo - c;
    return std::clamp((u - u0 + 0.5 * g * (u * u - u0 * u0)) / (hi - lo), 0.0, 1.0);
  }
  if (s.kind == kGaussian) {
    const double a = normal_cdf(-s.radius / s.sigma), b = normal_cdf(s.radius / s.sigma);
    const double z = std::clamp((x - s.mean[0]) / s.sigma, -s.radius / s.sigma, s.radius / s.sigma);
    return std::clamp((normal_cdf(z) - a) / (b - a), 0.0, 1.0);
  }
  const double total = std::accumulate(s.mixture_weights.begin(), s.mixture_weights.end(), 0.0);
  double v = 0.0;
  for (std::size_t k = 0; k < s.components.size(); ++k)
    v += s.mixture_weights[k] / total * cdf_1d(s.components[k], x);
  return v;
}

double quantile_1d(const DensitySpec& s, double q) {
  if (s.dim != 1) throw InputError("quantile_1d: one-dimensional spec required");
  if (!(q >= 0.0 && q <= 1.0)) throw InputError("quantile_1d: level outside [0,1]");
  if (s.kind == kUniform) return s.box.lo[0] + q * (s.box.hi[0] - s.box.lo[0]);
  if (s.kind == kProfile) {
    const double lo = s.box.lo[0], hi = s.box.hi[0];
    const double c = 0.5 * (lo + hi), g = s.gradient[0], u0 = lo - c;
    const double k = u0 + 0.5 * g * u0 * u0 + q * (hi - lo);
    if (std::abs(g) < 1e-14) return c + k;
    // Stable root of g/2 u^2 + u - k = 0 on the branch through u0.
    return c + 2.0 * k / (1.0 + std::sqrt(1.0 + 2.0 * g * k));
  }
  const Box b = s.support_bbox();
  double lo = b.lo[0], hi = b.hi[0];
  for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (cdf_1d(s, mid) < q ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

ParticleMeasure sample_stratified(const DensitySpec& spec, std::size_t count, std::uint64_t seed) {
  spec.validate();
  if (spec.dim != 1) throw InputError("sample_stratified: one-dimensional spec required");
  if (count == 0) throw InputError("sample_stratified: count must be at least 1");
  Rng rng(seed);
  std::vector<double> pos(count);
  for (std::size_t k = 0; k < count; ++k)
    pos[k] = quantile_1d(spec, (static_cast<double>(k) + rng.uniform()) / static_cast<double>(count));
  return ParticleMeasure::uniform_weights(1, std::move(pos));
}

}  // namespace ctrans
