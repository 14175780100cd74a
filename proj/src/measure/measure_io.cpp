#include "ctrans/measure_io.hpp"

#include "ctrans/errors.hpp"
#include "ctrans/text.hpp"
#include "ctrans/version.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace ctrans {

Provenance::Provenance() : version(kVersion) {}
Provenance::Provenance(std::string hash) : scenario_hash(std::move(hash)), version(kVersion) {}

std::string Provenance::comment_line() const {
  return "# scenario_hash=" + scenario_hash + " version=" + version + "\n";
}

void Provenance::stamp(nlohmann::json& j) const {
  j["scenario_hash"] = scenario_hash;
  j["version"] = version;
}

std::string measure_to_csv(const ParticleMeasure& mu, const Provenance& prov) {
  std::string out = prov.comment_line();
  for (int a = 0; a < mu.dim(); ++a) out += "x_" + std::to_string(a + 1) + ",";
  out += "weight,tag\n";
  for (std::size_t i = 0; i < mu.size(); ++i) {
    for (int a = 0; a < mu.dim(); ++a) out += format_double(mu.coord(i, a)) + ",";
    out += format_double(mu.weight(i)) + "," + std::to_string(mu.tag(i)) + "\n";
  }
  return out;
}

ParticleMeasure measure_from_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int dim = -1;
  std::size_t line_no = 0;
  std::vector<double> pos, w;
  std::vector<int> tags;
  bool any_tag = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (dim < 0) {
      if (cells.size() < 3 || cells[cells.size() - 2] != "weight" || cells.back() != "tag")
        throw InputError("particle csv line " + std::to_string(line_no) +
                         ": expected header x_1..x_d,weight,tag");
      dim = static_cast<int>(cells.size()) - 2;
      continue;
    }
    if (static_cast<int>(cells.size()) != dim + 2)
      throw InputError("particle csv line " + std::to_string(line_no) + ": wrong column count");
    for (int k = 0; k <= dim; ++k) {
      double v = 0.0;
      const auto& c = cells[k];
      auto res = std::from_chars(c.data(), c.data() + c.size(), v);
      if (res.ec != std::errc() || res.ptr != c.data() + c.size())
        throw InputError("particle csv line " + std::to_string(line_no) + ": bad number '" + c + "'");
      (k < dim ? pos : w).push_back(v);
    }
    const int t = std::stoi(cells.back());
    any_tag = any_tag || t != 0;
    tags.push_back(t);
  }
  if (dim < 0) throw InputError("particle csv: missing header");
  if (!any_tag) tags.clear();
  return ParticleMeasure(dim, std::move(pos), std::move(w), std::move(tags));
}

std::string measure_checksum(const ParticleMeasure& mu) {
  std::uint64_t h = fnv1a_doubles(mu.positions());
  h = fnv1a_doubles(mu.weights(), h);
  for (int t : mu.tags()) h = fnv1a(std::to_string(t), h);
  return hex64(h);
}

nlohmann::json measure_envelope(const ParticleMeasure& mu, const Provenance& prov) {
  nlohmann::json j{{"dim", mu.dim()},
                   {"count", mu.size()},
                   {"total_mass", mu.total_mass()},
                   {"checksum", measure_checksum(mu)}};
  prov.stamp(j);
  return j;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << content;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace ctrans
