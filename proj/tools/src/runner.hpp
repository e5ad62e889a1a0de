#pragma once
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "scenario.hpp"

namespace tunnel::cli {

enum ExitCode { kExitOk = 0, kExitInvalid = 1, kExitTolerance = 2 };

struct RunOptions {
  std::optional<std::string> out_dir;
  std::optional<std::vector<propagator::Method>> methods;
  // Compute every field twice and require bit-identical results.
  bool seed_check = false;
  std::ostream* log = nullptr;
};

struct RunResult {
  int exit_code = kExitOk;
  nlohmann::json report;
  std::vector<propagator::WaveField> fields;
};

// Runs every method of the scenario, writes one CSV per method and
// <name>_report.json into the output directory.
RunResult run_scenario(const ScenarioConfig& sc, const RunOptions& opts = {});

// One field by method tag, as run_scenario computes it.
propagator::WaveField compute_field(const ScenarioConfig& sc, propagator::Method method);

}  // namespace tunnel::cli
