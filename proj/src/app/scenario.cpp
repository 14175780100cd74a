#include "ctrans/app.hpp"

#include "ctrans/errors.hpp"
#include "ctrans/text.hpp"

#include <cmath>
#include <set>

namespace ctrans {

namespace {

std::vector<double> vec_field(const nlohmann::json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw InputError(where + "." + key + ": required field missing");
  try {
    return j.at(key).get<std::vector<double>>();
  } catch (const nlohmann::json::exception&) {
    throw InputError(where + "." + key + ": expected an array of numbers");
  }
}

double num_field(const nlohmann::json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw InputError(where + "." + key + ": required field missing");
  if (!j.at(key).is_number()) throw InputError(where + "." + key + ": expected a number");
  return j.at(key).get<double>();
}

void expect_dim(const std::vector<double>& v, int dim, const std::string& where) {
  if (static_cast<int>(v.size()) != dim)
    throw InputError(where + ": expected " + std::to_string(dim) + " components, got " + std::to_string(v.size()));
}

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [k, _] : j.items())
    if (!known.count(k)) throw InputError(where + "." + k + ": unknown field");
}

TimeField figure1_field(double amp, std::vector<double> c) {
  FieldMeta m;
  // |d/dx_i (a tanh tanh)| <= a max|sech^2 tanh| < 0.4 a, so a bounds the
  // Frobenius norm of the Jacobian.
  m.lipschitz = std::abs(amp);
  m.sup_bound = std::sqrt(1.0 + amp * amp);
  m.descriptor = {{"kind", "preset"}, {"name", "figure1"}, {"amplitude", amp}, {"center", c}};
  return TimeField(2, [amp, c](std::span<const double> x, double, std::span<double> o) {
    o[0] = 1.0;
    o[1] = amp * std::tanh(x[0] - c[0]) * std::tanh(x[1] - c[1]);
  }, m);
}

}  // namespace

TimeField field_from_descriptor(const nlohmann::json& j, int dim) {
  const std::string where = "scenario.v";
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
    throw InputError(where + ": expected an object with a string 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "constant") {
    auto c = vec_field(j, "value", where);
    expect_dim(c, dim, where + ".value");
    return constant_field(std::move(c));
  }
  if (kind == "affine") {
    if (!j.contains("matrix")) throw InputError(where + ".matrix: required field missing");
    std::vector<double> a;
    try {
      const auto& m = j.at("matrix");
      if (!m.empty() && m.front().is_array())
        for (const auto& row : m) {
          const auto r = row.get<std::vector<double>>();
          expect_dim(r, dim, where + ".matrix row");
          a.insert(a.end(), r.begin(), r.end());
        }
      else
        a = m.get<std::vector<double>>();
    } catch (const nlohmann::json::exception&) {
      throw InputError(where + ".matrix: expected numbers");
    }
    if (static_cast<int>(a.size()) != dim * dim) throw InputError(where + ".matrix: expected dim x dim entries");
    auto b = j.contains("offset") ? vec_field(j, "offset", where) : std::vector<double>(dim, 0.0);
    expect_dim(b, dim, where + ".offset");
    return affine_field(std::move(a), std::move(b));
  }
  if (kind == "radial") {
    auto c = vec_field(j, "center", where);
    expect_dim(c, dim, where + ".center");
    const double r = num_field(j, "rate", where);
    std::vector<double> a(dim * dim, 0.0), b(dim);
    for (int i = 0; i < dim; ++i) {
      a[i * dim + i] = r;
      b[i] = -r * c[i];
    }
    return affine_field(std::move(a), std::move(b));
  }
  if (kind == "preset") {
    if (!j.contains("name") || !j.at("name").is_string()) throw InputError(where + ".name: required string");
    const std::string name = j.at("name").get<std::string>();
    if (name == "figure1") {
      if (dim != 2) throw InputError(where + ": preset 'figure1' is two-dimensional");
      const double amp = j.contains("amplitude") ? num_field(j, "amplitude", where) : 0.3;
      auto c = j.contains("center") ? vec_field(j, "center", where) : std::vector<double>{6.0, 2.0};
      expect_dim(c, 2, where + ".center");
      return figure1_field(amp, std::move(c));
    }
    throw InputError(where + ".name: unknown preset '" + name + "'");
  }
  throw InputError(where + ".kind: unknown field kind '" + kind + "'");
}

nlohmann::json MeasureSource::to_json() const {
  if (density) return density->to_json();
  nlohmann::json atoms_j = nlohmann::json::array();
  for (std::size_t i = 0; i < atoms->size(); ++i) {
    const auto x = atoms->position(i);
    atoms_j.push_back(std::vector<double>(x.begin(), x.end()));
  }
  return {{"atoms", atoms_j}, {"weights", atoms->weights()}};
}

MeasureSource MeasureSource::from_json(const nlohmann::json& j, int dim, const std::string& where) {
  if (!j.is_object()) throw InputError(where + ": expected an object");
  MeasureSource m;
  if (j.contains("atoms")) {
    reject_unknown(j, {"atoms", "weights"}, where);
    std::vector<double> pos;
    try {
      for (const auto& a : j.at("atoms")) {
        const auto x = a.get<std::vector<double>>();
        expect_dim(x, dim, where + ".atoms entry");
        pos.insert(pos.end(), x.begin(), x.end());
      }
    } catch (const nlohmann::json::exception&) {
      throw InputError(where + ".atoms: expected an array of points");
    }
    const std::size_t count = pos.size() / static_cast<std::size_t>(dim);
    if (count == 0) throw InputError(where + ".atoms: empty atom list");
    std::vector<double> w = j.contains("weights") ? vec_field(j, "weights", where)
                                                  : std::vector<double>(count, 1.0 / static_cast<double>(count));
    if (w.size() != count) throw InputError(where + ".weights: one weight per atom expected");
    try {
      m.atoms = ParticleMeasure(dim, std::move(pos), std::move(w));
    } catch (const InputError& e) {
      throw InputError(where + ": " + e.what());
    }
    return m;
  }
  try {
    m.density = DensitySpec::from_json(j);
  } catch (const InputError& e) {
    throw InputError(where + ": " + e.what());
  }
  if (m.density->dim != dim) throw InputError(where + ": density dimension differs from scenario.dim");
  return m;
}

ParticleMeasure MeasureSource::realize(std::size_t count, std::uint64_t seed) const {
  if (atoms) return *atoms;
  return sample(*density, count, seed);
}

Box MeasureSource::support_bbox() const { return density ? density->support_bbox() : atoms->support_bbox(); }

nlohmann::json Scenario::to_json() const {
  nlohmann::json p{{"epsilon", params.epsilon}, {"delta", params.delta},     {"particles", params.particles},
                   {"seed", params.seed},       {"horizon", params.horizon}, {"tol", params.tol},
                   {"snapshots", params.snapshots}};
  p["n"] = params.n ? nlohmann::json(*params.n) : nlohmann::json(nullptr);
  p["margin"] = params.margin ? nlohmann::json(*params.margin) : nlohmann::json(nullptr);
  return {{"name", name}, {"dim", dim},           {"v", v},         {"omega", omega.to_json()},
          {"mu0", mu0.to_json()}, {"mu1", mu1.to_json()}, {"params", p}};
}

Scenario Scenario::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InputError("scenario: expected a JSON object");
  reject_unknown(j, {"name", "dim", "v", "omega", "mu0", "mu1", "params"}, "scenario");
  Scenario s;
  if (j.contains("name")) {
    if (!j.at("name").is_string()) throw InputError("scenario.name: expected a string");
    s.name = j.at("name").get<std::string>();
  }
  if (!j.contains("dim") || !j.at("dim").is_number_integer()) throw InputError("scenario.dim: required integer");
  s.dim = j.at("dim").get<int>();
  if (s.dim < 1 || s.dim > 2) throw InputError("scenario.dim: only 1 and 2 are supported");
  for (const char* key : {"v", "omega", "mu0", "mu1", "params"})
    if (!j.contains(key)) throw InputError(std::string("scenario.") + key + ": required field missing");
  s.v = j.at("v");
  field_from_descriptor(s.v, s.dim);
  try {
    s.omega = Region::from_json(j.at("omega"));
  } catch (const InputError& e) {
    throw InputError(std::string("scenario.omega: ") + e.what());
  }
  if (s.omega.dim() != s.dim) throw InputError("scenario.omega: dimension differs from scenario.dim");
  s.mu0 = MeasureSource::from_json(j.at("mu0"), s.dim, "scenario.mu0");
  s.mu1 = MeasureSource::from_json(j.at("mu1"), s.dim, "scenario.mu1");

  const auto& p = j.at("params");
  const std::string where = "scenario.params";
  if (!p.is_object()) throw InputError(where + ": expected an object");
  reject_unknown(p, {"n", "epsilon", "delta", "particles", "seed", "horizon", "tol", "margin", "snapshots"}, where);
  s.params.delta = num_field(p, "delta", where);
  if (!(s.params.delta > 0.0)) throw InputError(where + ".delta: must be positive");
  auto opt_num = [&](const char* key, double& dst) {
    if (p.contains(key) && !p.at(key).is_null()) dst = num_field(p, key, where);
    else s.defaults_applied.push_back(key);
  };
  auto opt_count = [&](const char* key, auto& dst) {
    if (p.contains(key) && !p.at(key).is_null()) {
      if (!p.at(key).is_number_unsigned()) throw InputError(where + "." + key + ": expected a nonnegative integer");
      dst = p.at(key).get<std::remove_reference_t<decltype(dst)>>();
    } else {
      s.defaults_applied.push_back(key);
    }
  };
  opt_num("epsilon", s.params.epsilon);
  opt_num("horizon", s.params.horizon);
  opt_num("tol", s.params.tol);
  opt_count("particles", s.params.particles);
  opt_count("seed", s.params.seed);
  opt_count("snapshots", s.params.snapshots);
  if (p.contains("n") && !p.at("n").is_null()) {
    if (!p.at("n").is_number_integer()) throw InputError(where + ".n: expected an integer");
    s.params.n = p.at("n").get<int>();
    if (*s.params.n < 3) throw InputError(where + ".n: must be at least 3");
  } else {
    s.defaults_applied.push_back("n");
  }
  if (p.contains("margin") && !p.at("margin").is_null()) s.params.margin = num_field(p, "margin", where);
  else s.defaults_applied.push_back("margin");
  if (!(s.params.epsilon > 0.0)) throw InputError(where + ".epsilon: must be positive");
  if (!(s.params.horizon > 0.0)) throw InputError(where + ".horizon: must be positive");
  if (!(s.params.tol > 0.0)) throw InputError(where + ".tol: must be positive");
  if (s.params.particles == 0) throw InputError(where + ".particles: must be positive");
  if (s.params.margin && !(*s.params.margin > 0.0)) throw InputError(where + ".margin: must be positive");
  return s;
}

Scenario Scenario::load(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text(path);
  } catch (const std::exception& e) {
    throw InputError(path.string() + ": cannot read file");
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  return from_json(j);
}

std::string Scenario::hash() const { return hex64(fnv1a(to_json().dump())); }

TimeField Scenario::velocity() const { return field_from_descriptor(v, dim); }

ParticleMeasure Scenario::sample_mu0() const { return mu0.realize(params.particles, params.seed); }
ParticleMeasure Scenario::sample_mu1() const { return mu1.realize(params.particles, params.seed + 1); }

ControlProblem Scenario::problem() const {
  ControlProblem p;
  p.v = velocity();
  p.omega = omega;
  p.mu0 = sample_mu0();
  p.mu1 = sample_mu1();
  p.delta = params.delta;
  p.epsilon = params.epsilon;
  p.tol = params.tol;
  p.horizon = params.horizon;
  p.margin = params.margin;
  p.n = params.n;
  p.seed = params.seed;
  p.snapshots_per_phase = params.snapshots;
  return p;
}

}  // namespace ctrans
