#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "bundled.hpp"
#include "runner.hpp"
#include "scenario.hpp"
#include "tunnel/errors.hpp"

using namespace tunnel;
using namespace tunnel::cli;

namespace {

std::vector<propagator::Method> parse_methods(const std::string& list) {
  std::vector<propagator::Method> out;
  std::stringstream in(list);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(propagator::method_from_string(item));
  }
  if (out.empty()) throw DomainError("--methods: at least one method required");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Propagation of sharp-edged wavepackets through 1-D barriers"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir;
  std::string methods;
  bool seed_check = false;
  auto* run = app.add_subcommand("run", "Compute every method of a scenario and write CSVs plus a JSON report");
  run->add_option("scenario", scenario_path, "Scenario file or bundled scenario name")->required();
  run->add_option("--out", out_dir, "Output directory (default: the scenario's output.dir)");
  run->add_option("--methods", methods, "Comma-separated methods replacing the scenario's list");
  run->add_flag("--seed-check", seed_check, "Recompute every field and require bit-identical output");

  auto* validate = app.add_subcommand("validate", "Check a scenario without computing");
  validate->add_option("scenario", scenario_path, "Scenario file or bundled scenario name")->required();

  auto* list = app.add_subcommand("list", "List bundled scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  if (list->parsed()) {
    for (const auto& b : bundled_scenarios()) std::cout << b.name << "\n";
    return kExitOk;
  }

  ScenarioConfig sc;
  try {
    sc = load_scenario(scenario_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  if (validate->parsed()) {
    std::cout << "ok\n";
    return kExitOk;
  }

  RunOptions opts;
  opts.seed_check = seed_check;
  opts.log = &std::cerr;
  if (!out_dir.empty()) opts.out_dir = out_dir;
  try {
    if (!methods.empty()) {
      opts.methods = parse_methods(methods);
      for (auto m : *opts.methods) {
        if (m == propagator::Method::kOracle && !sc.oracle) throw DomainError("--methods: oracle needs an oracle block");
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  try {
    const RunResult r = run_scenario(sc, opts);
    std::cout << r.report.dump(2) << "\n";
    return r.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
}
