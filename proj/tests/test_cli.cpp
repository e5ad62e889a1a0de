#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "bundled.hpp"
#include "json_lines.hpp"
#include "runner.hpp"
#include "scenario.hpp"

using namespace tunnel::cli;
namespace fs = std::filesystem;

namespace {

// A quick scenario; `grid` and `extra` are spliced in.
std::string scenario(const std::string& grid, const std::string& methods, const std::string& extra = "") {
  return "{\n"
         "  \"name\": \"quick\",\n"
         "  \"model\": {\"kind\": \"delta\", \"lambda\": 1.0, \"position\": 0.0},\n"
         "  \"initial\": {\"type\": \"exp-sum\", \"terms\": [[1, 0, 1, 0]]},\n"
         "  \"grid\": " +
         grid +
         ",\n"
         "  \"methods\": " +
         methods + extra + "\n}\n";
}

const std::string kGrid = "{\"xs\": {\"from\": 2, \"to\": 6, \"count\": 5}, \"ts\": [0.2, 0.5]}";

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("tunnel_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST(JsonLineIndex, PointersMapToLines) {
  const std::string text = "{\n  \"a\": 1,\n  \"b\": {\n    \"c\": [10,\n      20]\n  },\n  \"d~/\": true\n}";
  const JsonLineIndex idx(text);
  EXPECT_EQ(idx.line_of(""), 1);
  EXPECT_EQ(idx.line_of("/a"), 2);
  EXPECT_EQ(idx.line_of("/b"), 3);
  EXPECT_EQ(idx.line_of("/b/c"), 4);
  EXPECT_EQ(idx.line_of("/b/c/1"), 5);
  EXPECT_EQ(idx.line_of("/d~0~1"), 7);
  EXPECT_EQ(idx.line_of("/b/c/7"), 4);
  EXPECT_EQ(idx.line_of("/missing/deep"), 1);
}

TEST(Scenario, ParsesAQuickScenario) {
  const auto sc = parse_scenario(scenario(kGrid, "[\"closed\", \"series\"]"), "inline");
  EXPECT_EQ(sc.name, "quick");
  EXPECT_EQ(sc.grid.xs.size(), 5u);
  EXPECT_DOUBLE_EQ(sc.grid.xs.back(), 6.0);
  EXPECT_EQ(sc.methods.size(), 2u);
}

TEST(Scenario, ZeroTimeIsRejectedWithItsLine) {
  const std::string grid = "{\"xs\": [2, 3],\n    \"ts\": [0.0]}";
  try {
    parse_scenario(scenario(grid, "[\"closed\"]"), "inline");
    FAIL() << "expected ScenarioError";
  } catch (const ScenarioError& e) {
    EXPECT_EQ(e.line(), 6);
    EXPECT_NE(std::string(e.what()).find("t > 0"), std::string::npos) << e.what();
  }
}

TEST(Scenario, PointInsideTheBarrierIsNamed) {
  const std::string text =
      "{\"name\": \"slab\", \"model\": {\"kind\": \"rectangular\", \"v0\": 1, \"half_width\": 1, \"position\": 0},\n"
      " \"grid\": {\"xs\": [1.5, 3], \"ts\": [1]}, \"methods\": [\"series\"]}";
  try {
    parse_scenario(text, "inline");
    FAIL() << "expected ScenarioError";
  } catch (const ScenarioError& e) {
    EXPECT_NE(std::string(e.what()).find("1.5"), std::string::npos) << e.what();
  }
}

TEST(Scenario, MalformedInputIsRejected) {
  EXPECT_THROW(parse_scenario("{\"name\": ", "inline"), ScenarioError);
  EXPECT_THROW(parse_scenario(scenario(kGrid, "[\"magic\"]"), "inline"), ScenarioError);
  EXPECT_THROW(parse_scenario(scenario(kGrid, "[]"), "inline"), ScenarioError);
  EXPECT_THROW(load_scenario("/nonexistent/file.json"), std::exception);
}

TEST(Scenario, BundledScenariosAllValidate) {
  std::set<std::string> names;
  for (const auto& b : bundled_scenarios()) {
    names.emplace(b.name);
    EXPECT_NO_THROW(load_scenario(std::string(b.name))) << b.name;
  }
  const std::set<std::string> want{"delta_step",      "delta_cancellation", "rectangular_resonance", "reflectionless_step",
                                   "wkb_gaussian",    "free_shutter",       "smoothing_sweep"};
  EXPECT_EQ(names, want);
}

TEST(Runner, WritesFieldsAndReport) {
  const auto dir = scratch("run");
  auto sc = parse_scenario(scenario(kGrid, "[\"closed\", \"series\", \"quadrature\"]",
                                    ",\n  \"tolerances\": {\"rel_l2\": [{\"a\": \"closed\", \"b\": \"quadrature\", "
                                    "\"max\": 1e-8}]}"),
                           "inline");
  RunOptions opts;
  opts.out_dir = dir.string();
  opts.seed_check = true;
  const auto r = run_scenario(sc, opts);
  EXPECT_EQ(r.exit_code, kExitOk);
  EXPECT_EQ(r.report["status"], "ok");
  EXPECT_EQ(r.report["determinism"]["identical"], true);
  for (const char* m : {"closed", "series", "quadrature"}) {
    EXPECT_TRUE(fs::exists(dir / (std::string("quick_") + m + ".csv"))) << m;
  }
  EXPECT_TRUE(fs::exists(dir / "quick_report.json"));
  const auto again = run_scenario(sc, opts);
  std::ifstream a(dir / "quick_closed.csv");
  std::stringstream sa;
  sa << a.rdbuf();
  EXPECT_EQ(again.exit_code, kExitOk);
  EXPECT_FALSE(sa.str().empty());
  fs::remove_all(dir);
}

TEST(Runner, ToleranceViolationExitsTwo) {
  const auto dir = scratch("tol");
  const auto sc = parse_scenario(
      scenario(kGrid, "[\"closed\", \"series\"]",
               ",\n  \"series_order\": 0,\n  \"tolerances\": {\"rel_l2\": [{\"a\": \"closed\", \"b\": \"series\", \"max\": 1e-12}]}"),
      "inline");
  RunOptions opts;
  opts.out_dir = dir.string();
  const auto r = run_scenario(sc, opts);
  EXPECT_EQ(r.exit_code, kExitTolerance);
  EXPECT_EQ(r.report["status"], "tolerance-violated");
  EXPECT_FALSE(r.report["violations"].empty());
  fs::remove_all(dir);
}

TEST(Runner, AsymptoticOutsideItsRegimeWarns) {
  const auto dir = scratch("asym");
  // x^2/4t = 4.
  const auto sc = parse_scenario(scenario("{\"xs\": [4], \"ts\": [1]}", "[\"asymptotic\"]"), "inline");
  RunOptions opts;
  opts.out_dir = dir.string();
  const auto r = run_scenario(sc, opts);
  EXPECT_EQ(r.exit_code, kExitOk);
  EXPECT_FALSE(r.report["methods"][0]["warnings"].empty());
  fs::remove_all(dir);
}
