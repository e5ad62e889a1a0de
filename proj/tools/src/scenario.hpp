#pragma once
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tunnel/initial_state.hpp"
#include "tunnel/oracle_tdse.hpp"
#include "tunnel/propagator.hpp"
#include "tunnel/transmission.hpp"

namespace tunnel::cli {

// Parse or validation failure, carrying the scenario line it refers to.
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(const std::string& origin, int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

struct ToleranceRelL2 {
  std::string a;
  std::string b;
  double max = 0.0;
};

// Residual |psi - psi_ref| / |psi_ref| (or the density) fitted as a power
// of x at one sample time. The reference is either the free evolution of the
// same f ("free") or the uniform shutter f(0) phi_free(0, x, t) ("shutter").
struct DecayAnalysis {
  std::string method;
  std::string quantity = "residual";
  std::string reference = "free";
  std::size_t t_index = 0;
  double x_from = 0.0;
  double x_to = 0.0;
  std::optional<std::pair<double, double>> exponent_range;
};

// Extrema of |psi / psi_free| against xL/t near m pi.
struct ResonanceAnalysis {
  std::string method;
  std::vector<int> orders{1, 2, 3};
  std::optional<double> max_cells;
};

// max |psi / psi_free - 1| over the grid.
struct ShortTimeAnalysis {
  std::string method;
  std::optional<double> max;
};

// Smoothed-oracle deviation from a sharp method, near and far from t/2eps.
struct SmoothingAnalysis {
  std::string sharp;
  std::vector<double> epsilons;
  double near_factor = 0.2;
  double far_factor = 5.0;
  std::optional<double> near_max;
  std::optional<double> far_ratio;
};

struct ScenarioConfig {
  std::string name;
  std::string description;
  std::string origin;

  transmission::TransmissionModel model = transmission::TransmissionModel::free();
  // Barrier location: the delta position, the left edge of a slab or
  // profile, the centre of the sech^2 well.
  double position = 0.0;
  initial_state::InitialState initial = initial_state::ExponentialSum::constant(1.0);
  propagator::Grid grid;
  std::vector<propagator::Method> methods;

  int series_order = kernel::kDefaultOrder;
  int b_series_inner = kernel::kDefaultInnerOrder;

  std::optional<oracle_tdse::OracleConfig> oracle;
  std::vector<double> delta_widths{0.04, 0.02, 0.01};

  std::vector<ToleranceRelL2> rel_l2;
  std::optional<DecayAnalysis> decay;
  std::optional<ResonanceAnalysis> resonances;
  std::optional<ShortTimeAnalysis> short_time;
  std::optional<SmoothingAnalysis> smoothing;

  std::string output_dir;
};

// Parses and validates a scenario document. `origin` names the source in
// diagnostics (a path or "bundled:<name>").
ScenarioConfig parse_scenario(const std::string& text, const std::string& origin);

// Reads a file, or a bundled scenario when `path_or_name` is not a file but
// matches a bundled name.
ScenarioConfig load_scenario(const std::string& path_or_name);

}  // namespace tunnel::cli
