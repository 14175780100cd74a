#include "ctrans/app.hpp"
#include "ctrans/errors.hpp"

#include <doctest.h>

#include <filesystem>
#include <sstream>

using namespace ctrans;

namespace {

const std::filesystem::path kScenarios = std::filesystem::path(CTRANS_SOURCE_DIR) / "scenarios";

std::filesystem::path scratch(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("ctrans_unit_" + name);
  std::filesystem::remove_all(p);
  return p;
}

nlohmann::json minimal() {
  return nlohmann::json::parse(R"({
    "dim": 1,
    "v": {"kind": "constant", "value": [1.0]},
    "omega": {"kind": "box", "lo": [2.0], "hi": [4.0]},
    "mu0": {"atoms": [[0.0], [0.5]]},
    "mu1": {"atoms": [[6.0], [6.5]]},
    "params": {"delta": 0.5}
  })");
}

std::string error_of(const nlohmann::json& j) {
  try {
    Scenario::from_json(j);
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("scenarios round-trip through their canonical form") {
  for (const char* f : {"figure1.json", "away.json", "exact_atoms.json", "study_uniform.json"}) {
    const Scenario s = Scenario::load(kScenarios / f);
    const Scenario again = Scenario::from_json(nlohmann::json::parse(s.to_json().dump()));
    CHECK(again == s);
    CHECK(again.hash() == s.hash());
  }
}

TEST_CASE("defaults are recorded, not silent") {
  const Scenario s = Scenario::from_json(minimal());
  for (const char* key : {"epsilon", "particles", "seed", "horizon", "tol", "n", "margin"})
    CHECK(std::find(s.defaults_applied.begin(), s.defaults_applied.end(), key) != s.defaults_applied.end());
  CHECK(s.to_json().at("params").at("epsilon") == 0.05);
  CHECK(s.name == "scenario");
}

TEST_CASE("field diagnostics name the offending path") {
  auto j = minimal();
  j["params"].erase("delta");
  CHECK(error_of(j) == "scenario.params.delta: required field missing");
  j = minimal();
  j["params"]["delta"] = -1.0;
  CHECK(error_of(j).find("scenario.params.delta") == 0);
  j = minimal();
  j["omega"] = {{"kind", "box"}, {"lo", {0.0, 0.0}}, {"hi", {1.0, 1.0}}};
  CHECK(error_of(j).find("scenario.omega") == 0);
  j = minimal();
  j["v"] = {{"kind", "vortex"}};
  CHECK(error_of(j).find("scenario.v.kind") == 0);
  j = minimal();
  j["mu0"] = {{"atoms", {{0.0, 1.0}}}};
  CHECK(error_of(j).find("scenario.mu0") == 0);
  j = minimal();
  j["params"]["partciles"] = 10;
  CHECK(error_of(j) == "scenario.params.partciles: unknown field");
  j = minimal();
  j.erase("mu1");
  CHECK(error_of(j) == "scenario.mu1: required field missing");
}

TEST_CASE("malformed json reports line and column") {
  const auto dir = scratch("bad_json");
  std::filesystem::create_directories(dir);
  write_text(dir / "bad.json", "{\n  \"dim\": 1,\n  \"v\": {\"kind\": \"constant\"\n}\n");
  try {
    Scenario::load(dir / "bad.json");
    FAIL("expected a parse error");
  } catch (const InputError& e) {
    const std::string what = e.what();
    CHECK(what.find("line 5") != std::string::npos);
    CHECK(what.find("column") != std::string::npos);
  }
  CHECK_THROWS_AS(Scenario::load(dir / "missing.json"), InputError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("velocity descriptors") {
  const TimeField r = field_from_descriptor({{"kind", "radial"}, {"center", {1.0, 1.0}}, {"rate", -2.0}}, 2);
  const std::vector<double> x{2.0, 0.0};
  CHECK(r.at(x, 0.0) == std::vector<double>{-2.0, 2.0});
  const TimeField a = field_from_descriptor({{"kind", "affine"}, {"matrix", {{0.0, 1.0}, {-1.0, 0.0}}}, {"offset", {0.5, 0.0}}}, 2);
  CHECK(a.at(x, 0.0) == std::vector<double>{0.5, -2.0});
  const TimeField f = field_from_descriptor({{"kind", "preset"}, {"name", "figure1"}}, 2);
  const std::vector<double> c{6.0, 2.0};
  CHECK(f.at(c, 0.0) == std::vector<double>{1.0, 0.0});
  CHECK(f.lipschitz() == doctest::Approx(0.3));
  CHECK_THROWS_AS(field_from_descriptor({{"kind", "preset"}, {"name", "figure9"}}, 2), InputError);
  CHECK_THROWS_AS(field_from_descriptor({{"kind", "constant"}, {"value", {1.0}}}, 2), InputError);
}

TEST_CASE("run exits 2 with a counterexample when the condition fails") {
  const auto out = scratch("away");
  CommandOptions o;
  o.scenario = kScenarios / "away.json";
  o.out = out;
  std::ostringstream log;
  CHECK(run_command(o, log) == 2);
  const auto report = nlohmann::json::parse(read_text(out / "report.json"));
  CHECK(report.at("status") == "geometric_condition_failed");
  CHECK(report.at("counterexample").at("point").size() == 2);
  CHECK(report.contains("scenario_hash"));
  CHECK(check_command(o, log) == 2);
  std::filesystem::remove_all(out);
}

TEST_CASE("exact run on atoms is exact and deterministic") {
  CommandOptions o;
  o.scenario = kScenarios / "exact_atoms.json";
  o.mode = "exact";
  std::ostringstream log;
  std::string first;
  for (int rep = 0; rep < 2; ++rep) {
    o.out = scratch("exact" + std::to_string(rep));
    CHECK(run_command(o, log) == 0);
    const auto report = nlohmann::json::parse(read_text(o.out / "report.json"));
    CHECK(report.at("final_w1").get<double>() <= 1e-9);
    const std::string bytes = read_text(o.out / "report.json") + read_text(o.out / "schedule.json") +
                              read_text(o.out / "trajectory" / "snapshot_0003.csv");
    if (rep == 0) first = bytes;
    else CHECK(bytes == first);
    std::filesystem::remove_all(o.out);
  }
}

TEST_CASE("command input errors") {
  CommandOptions o;
  std::ostringstream log;
  o.out = scratch("errs");
  CHECK_THROWS_AS(counterexample_command("nope", o, log), InputError);
  CHECK_THROWS_AS(run_command(o, log), InputError);
  o.scenario = kScenarios / "exact_atoms.json";
  o.mode = "sideways";
  CHECK_THROWS_AS(run_command(o, log), InputError);
  std::filesystem::remove_all(o.out);
}

TEST_CASE("study csv layout") {
  const std::vector<StudyRow> rows{{4, 0.01, 1.625, 0.02}};
  const std::string csv = study_csv(rows, Provenance("h"));
  CHECK(csv.find("n,measured_w1,paper_bound,sample_error\n4,0.01,1.625,0.02\n") != std::string::npos);
  CHECK(csv.rfind("# scenario_hash=h", 0) == 0);
}

TEST_CASE("bv merge on the geodesic grows with the particle count") {
  const auto rows = bv_merge_geodesic({50, 100, 200});
  REQUIRE(rows.size() == 3);
  for (std::size_t k = 1; k < rows.size(); ++k) {
    CHECK(rows[k].integral > rows[k - 1].integral);
    CHECK(rows[k].final_gap < rows[k - 1].final_gap);
  }
}
