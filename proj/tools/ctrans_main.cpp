#include "ctrans/app.hpp"
#include "ctrans/errors.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

namespace {

void add_common(CLI::App* cmd, ctrans::CommandOptions& o, std::optional<std::uint64_t>& seed,
                std::optional<std::size_t>& particles) {
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--seed-override", seed, "replace the scenario seed");
  cmd->add_option("--particles", particles, "replace the particle count");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Particle simulations of controlled transport: synthesis, runs and diagnostics"};
  app.require_subcommand(1);
  ctrans::CommandOptions o;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> particles;
  std::string n_list;
  std::string name;

  auto* run = app.add_subcommand("run", "synthesize a control and simulate the scenario");
  run->add_option("--scenario", o.scenario, "scenario JSON")->required();
  run->add_option("--mode", o.mode, "approx or exact")->check(CLI::IsMember({"approx", "exact"}));
  add_common(run, o, seed, particles);
  run->get_option("--out")->required();

  auto* study = app.add_subcommand("study", "grid-control convergence study");
  study->add_option("--scenario", o.scenario, "scenario JSON")->required();
  study->add_option("--n-list", n_list, "comma-separated grid resolutions");
  add_common(study, o, seed, particles);
  study->get_option("--out")->required();

  auto* cex = app.add_subcommand("counterexample", "bv-merge, sqrt-split or shear");
  cex->add_option("name", name, "counterexample name")->required();
  add_common(cex, o, seed, particles);
  cex->get_option("--out")->required();

  auto* check = app.add_subcommand("check", "check the geometric condition only");
  check->add_option("--scenario", o.scenario, "scenario JSON")->required();
  add_common(check, o, seed, particles);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  o.seed_override = seed;
  o.particles = particles;

  try {
    if (!n_list.empty()) {
      std::stringstream ss(n_list);
      std::string item;
      while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        int n = 0;
        try {
          n = std::stoi(item, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used == 0 || used != item.size()) throw ctrans::InputError("--n-list: '" + item + "' is not an integer");
        o.n_list.push_back(n);
      }
    }
    if (*run) return ctrans::run_command(o, std::cout);
    if (*study) return ctrans::study_command(o, std::cout);
    if (*cex) return ctrans::counterexample_command(name, o, std::cout);
    return ctrans::check_command(o, std::cout);
  } catch (const ctrans::GeometricConditionError& e) {
    std::cerr << "geometric condition fails: " << e.what() << "\n";
    return 2;
  } catch (const ctrans::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
