#pragma once

#include <string>
#include <vector>

#include "tunnel/initial_state.hpp"
#include "tunnel/kernel.hpp"
#include "tunnel/transmission.hpp"

namespace tunnel::propagator {

using initial_state::ExponentialSum;
using initial_state::InitialState;
using transmission::TransmissionModel;

enum class Method { kAuto, kClosed, kSeries, kBSeries, kAsymptotic, kQuadrature, kOracle };

std::string to_string(Method m);
/// Accepts the names produced by to_string; throws DomainError otherwise.
Method method_from_string(const std::string& name);

struct Grid {
  std::vector<double> xs;
  std::vector<double> ts;
  /// Right edge of the barrier; every x must lie beyond it.
  double barrier_edge = 0.0;

  /// Throws DomainError naming the first offending point.
  void validate() const;
};

/// psi on a (t, x) grid, stored row-major with one row per time.
struct WaveField {
  std::vector<double> xs;
  std::vector<double> ts;
  std::vector<cplx> psi;
  std::vector<double> err;
  std::string method;
  /// Per-point method names when they differ from `method` (auto mode).
  std::vector<std::string> point_methods;
  std::vector<std::string> warnings;

  WaveField() = default;
  WaveField(const Grid& grid, std::string method_name);

  std::size_t index(std::size_t it, std::size_t ix) const { return it * xs.size() + ix; }
  cplx at(std::size_t it, std::size_t ix) const { return psi[index(it, ix)]; }
  double density(std::size_t it, std::size_t ix) const { return std::norm(at(it, ix)); }
};

/// psi = sum_{n <= N} a_n f^(n)(0). The error estimate adds the magnitude of
/// the last retained term.
WaveField propagate_series(const TransmissionModel& model, const InitialState& f, const Grid& grid,
                           int N = kernel::kDefaultOrder, const kernel::Options& opts = {});

/// Delta barrier of strength lambda (potential lambda delta(x - L)), exact.
WaveField propagate_closed_delta(double lambda, const ExponentialSum& f, const Grid& grid);

/// Reflectionless well -2a^2 sech^2(a(x - L)), exact.
WaveField propagate_closed_reflectionless(double a, const ExponentialSum& f, const Grid& grid);

/// psi = sum_j c_j phi_free(-i mu_j), exact for T = 1.
WaveField propagate_closed_free(const ExponentialSum& f, const Grid& grid);

/// Dispatches to the closed form of a free, delta or reflectionless model.
WaveField propagate_closed(const TransmissionModel& model, const ExponentialSum& f, const Grid& grid);

/// Leading large-distance term T(x/2t) sqrt(it/pi) exp(ix^2/4t) f(0)/x.
/// With strict = true a point with x^2/4t < 25 raises RegimeError;
/// otherwise it is recorded as a warning. Points below 100 always warn.
WaveField propagate_asymptotic(const TransmissionModel& model, const InitialState& f, const Grid& grid,
                               bool strict = true);

/// Stationary-phase series (1/2pi) exp(ix^2/4t) sum_n b_n f^(n)(0).
WaveField propagate_b_series(const TransmissionModel& model, const InitialState& f, const Grid& grid,
                             int N = kernel::kDefaultOrder, int M = kernel::kDefaultInnerOrder);

/// Kernel options with force_quadrature set.
kernel::Options quadrature_defaults();

/// psi = sum_j c_j phi(-i mu_j): the q-integral of phi against F(q) closed
/// around the poles of F. Uses the kernel's quadrature path unless
/// opts.force_quadrature is cleared.
WaveField propagate_quadrature(const TransmissionModel& model, const ExponentialSum& f, const Grid& grid,
                               kernel::Options opts = quadrature_defaults());

/// Closed form when available, series for x^2/4t < 25, else the b-series.
WaveField propagate_auto(const TransmissionModel& model, const InitialState& f, const Grid& grid);

/// Relative L2 distance ||a - ref|| / ||ref|| over all grid points.
double rel_l2(const WaveField& a, const WaveField& ref);

/// CSV with columns t,x,re_psi,im_psi,density,err_estimate,method, written
/// to a temporary file and renamed into place.
void write_csv(const WaveField& field, const std::string& path);

}  // namespace tunnel::propagator
