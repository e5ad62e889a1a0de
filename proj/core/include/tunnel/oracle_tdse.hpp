#pragma once

#include <variant>
#include <vector>

#include "tunnel/initial_state.hpp"
#include "tunnel/propagator.hpp"
#include "tunnel/transmission.hpp"

namespace tunnel::oracle_tdse {

using initial_state::ExponentialSum;
using propagator::Grid;
using propagator::WaveField;

struct NoPotential {};
/// height on [start, start + width]; a delta of strength lambda at L is a
/// rectangle of height lambda/w centred on L.
struct RectPotential {
  double height = 0.0;
  double start = 0.0;
  double width = 0.0;
};
/// -2a^2 sech^2(a(x - center)).
struct Sech2Potential {
  double a = 1.0;
  double center = 20.0;
};
/// Smooth profile V(x - start) on [start, start + length].
struct ProfilePotential {
  transmission::BarrierProfile profile;
  double start = 0.0;
};
using Potential = std::variant<NoPotential, RectPotential, Sech2Potential, ProfilePotential>;

RectPotential delta_as_rectangle(double lambda, double center, double width);

struct OracleConfig {
  double x_min = -20.0;
  double x_max = 20.0;
  double dx = 1e-3;
  double dt = 1e-5;
  /// Edge width of the smoothed step f(x) erfc(x/eps)/2.
  double epsilon = 1e-2;
  /// Complex absorbing potential -i W ((x - x_abs)/w)^4 inside both ends.
  double absorber_width = 5.0;
  double absorber_strength = 1000.0;
  bool absorbers = true;
  Potential potential = NoPotential{};
  /// Relative per-step tolerance of the norm balance check.
  double norm_tolerance = 1e-6;

  /// Throws DomainError on violated invariants.
  void validate() const;
};

/// Cell-averaged potential on the oracle grid (for inspection and tests).
std::vector<double> discretize_potential(const OracleConfig& cfg);

struct EvolveStats {
  std::size_t steps = 0;
  /// Largest per-step mismatch in the norm balance, relative to ||psi0||^2.
  double worst_norm_drift = 0.0;
  double initial_norm = 0.0;
  double final_norm = 0.0;
};

/// Crank-Nicolson evolution of f(x) erfc(x/eps)/2, sampled at grid.xs for
/// every grid.ts (each a multiple of dt) by four-point interpolation. The
/// left absorber relaxes towards the undisturbed incoming profile so that
/// non-decaying f (steps, plane waves) are supported.
WaveField evolve(const OracleConfig& cfg, const ExponentialSum& f, const Grid& grid, EvolveStats* stats = nullptr);

/// Delta barrier via a sequence of rectangles of equal area and decreasing
/// width; returns the polynomial (Neville) extrapolation to zero width. The
/// error estimate is the change when the widest rectangle is dropped.
WaveField evolve_delta_refined(const OracleConfig& cfg, double lambda, double center, const ExponentialSum& f,
                               const Grid& grid, const std::vector<double>& widths = {0.04, 0.02, 0.01});

struct SmoothingReport {
  double epsilon = 0.0;
  double t = 0.0;
  /// t/(2 eps), the distance below which the sharp-step result applies.
  double boundary = 0.0;
  std::vector<double> xs;
  std::vector<double> deviation;
};

/// Relative deviation |psi_oracle - psi_sharp|/|psi_sharp| per distance for
/// each epsilon, with the sharp field supplied by the caller on grid.xs at
/// the single time grid.ts[0].
std::vector<SmoothingReport> smoothing_validity_sweep(const OracleConfig& cfg, const ExponentialSum& f,
                                                      const Grid& grid, const WaveField& sharp,
                                                      const std::vector<double>& epsilons);

}  // namespace tunnel::oracle_tdse
