#pragma once
#include <vector>

#include "tunnel/propagator.hpp"

namespace tunnel::cli {

using propagator::WaveField;

// Least-squares slope of log y against log x over points with y > 0.
struct PowerFit {
  double exponent = 0.0;
  double log_amplitude = 0.0;
  std::size_t points = 0;
};
PowerFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

// |psi - ref| / |ref| at sample time it for x in [x_from, x_to].
PowerFit fit_residual_decay(const WaveField& psi, const WaveField& ref, std::size_t it, double x_from, double x_to);

// |psi|^2 against x at sample time it for x in [x_from, x_to].
PowerFit fit_density_decay(const WaveField& psi, std::size_t it, double x_from, double x_to);

struct ResonanceRow {
  int order = 0;
  double expected = 0.0;  // m pi
  double found = 0.0;     // nearest extremum of |psi/psi_free|, in xL/t
  bool maximum = false;
  double deviation_cells = 0.0;
  bool located = false;
};

// Extrema of |psi/psi_free| along x at sample time it, expressed in u = xL/t.
// A grid cell is the local spacing in u.
std::vector<ResonanceRow> resonance_table(const WaveField& psi, const WaveField& free, std::size_t it,
                                          double half_width, const std::vector<int>& orders);

// max over the grid of |psi/psi_free - 1|.
double short_time_deviation(const WaveField& psi, const WaveField& free);

}  // namespace tunnel::cli
