#pragma once

#include "ctrans/measure.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <string_view>

namespace ctrans {

// Stamped into every file the tools write.
struct Provenance {
  std::string scenario_hash = "none";
  std::string version;

  Provenance();
  explicit Provenance(std::string hash);
  std::string comment_line() const;
  void stamp(nlohmann::json& j) const;
};

// Columns x_1..x_d, weight, tag. A leading '#' line carries provenance.
std::string measure_to_csv(const ParticleMeasure& mu, const Provenance& prov);
ParticleMeasure measure_from_csv(std::string_view text);

std::string measure_checksum(const ParticleMeasure& mu);
nlohmann::json measure_envelope(const ParticleMeasure& mu, const Provenance& prov);

void write_text(const std::filesystem::path& path, const std::string& content);
std::string read_text(const std::filesystem::path& path);

}  // namespace ctrans
