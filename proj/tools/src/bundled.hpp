#pragma once
#include <string_view>
#include <vector>

namespace tunnel::cli {

struct BundledScenario {
  std::string_view name;
  std::string_view text;
};

// Scenario files from tools/scenarios, compiled into the binary.
const std::vector<BundledScenario>& bundled_scenarios();

}  // namespace tunnel::cli
