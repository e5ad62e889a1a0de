#include "analysis.hpp"

#include <cmath>
#include <numbers>

#include "tunnel/errors.hpp"

namespace tunnel::cli {

PowerFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0 && y[i] > 0.0)) continue;
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) throw DomainError("power-law fit: fewer than two usable points");
  const double det = static_cast<double>(n) * sxx - sx * sx;
  if (!(det > 0.0)) throw DomainError("power-law fit: degenerate abscissae");
  PowerFit fit;
  fit.exponent = (static_cast<double>(n) * sxy - sx * sy) / det;
  fit.log_amplitude = (sy - fit.exponent * sx) / static_cast<double>(n);
  fit.points = n;
  return fit;
}

PowerFit fit_residual_decay(const WaveField& psi, const WaveField& ref, std::size_t it, double x_from, double x_to) {
  std::vector<double> x, y;
  for (std::size_t ix = 0; ix < psi.xs.size(); ++ix) {
    if (psi.xs[ix] < x_from || psi.xs[ix] > x_to) continue;
    x.push_back(psi.xs[ix]);
    y.push_back(std::abs(psi.at(it, ix) - ref.at(it, ix)) / std::abs(ref.at(it, ix)));
  }
  return fit_power_law(x, y);
}

PowerFit fit_density_decay(const WaveField& psi, std::size_t it, double x_from, double x_to) {
  std::vector<double> x, y;
  for (std::size_t ix = 0; ix < psi.xs.size(); ++ix) {
    if (psi.xs[ix] < x_from || psi.xs[ix] > x_to) continue;
    x.push_back(psi.xs[ix]);
    y.push_back(psi.density(it, ix));
  }
  return fit_power_law(x, y);
}

std::vector<ResonanceRow> resonance_table(const WaveField& psi, const WaveField& free, std::size_t it,
                                          double half_width, const std::vector<int>& orders) {
  const double t = psi.ts[it];
  const std::size_t n = psi.xs.size();
  std::vector<double> u(n), r(n);
  for (std::size_t ix = 0; ix < n; ++ix) {
    u[ix] = psi.xs[ix] * half_width / t;
    r[ix] = std::abs(psi.at(it, ix) / free.at(it, ix));
  }
  std::vector<ResonanceRow> rows;
  for (int m : orders) {
    ResonanceRow row;
    row.order = m;
    row.expected = m * std::numbers::pi;
    double best = INFINITY;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double left = r[i] - r[i - 1];
      const double right = r[i + 1] - r[i];
      if (!(left * right < 0.0)) continue;
      const double d = std::abs(u[i] - row.expected);
      if (d < best) {
        best = d;
        row.found = u[i];
        row.maximum = left > 0.0;
        const double cell = 0.5 * (u[i + 1] - u[i - 1]);
        row.deviation_cells = (u[i] - row.expected) / cell;
        row.located = true;
      }
    }
    rows.push_back(row);
  }
  return rows;
}

double short_time_deviation(const WaveField& psi, const WaveField& free) {
  double worst = 0.0;
  for (std::size_t k = 0; k < psi.psi.size(); ++k) worst = std::max(worst, std::abs(psi.psi[k] / free.psi[k] - 1.0));
  return worst;
}

}  // namespace tunnel::cli
