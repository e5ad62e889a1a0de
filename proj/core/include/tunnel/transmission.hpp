#pragma once

#include <complex>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "tunnel/jet.hpp"

namespace tunnel {

using cplx = std::complex<double>;

namespace transmission {

/// Smooth barrier V(eta) on [0, length], used by the WKB model.
struct BarrierProfile {
  std::function<double(double)> v;
  double length = 0.0;
  double v_max = 0.0;
  std::string description;

  static BarrierProfile constant(double v0, double length);
  /// V0 exp(-(eta - length/2)^2 / sigma^2).
  static BarrierProfile gaussian(double v0, double length, double sigma);
  /// Piecewise-linear through equally spaced samples on [0, length].
  static BarrierProfile sampled(std::vector<double> values, double length);
};

/// Sampled k -> T(k) with monotone-cubic interpolation of Re T and Im T.
/// T = 1 outside the sampled range.
class TransmissionTable {
 public:
  TransmissionTable(std::vector<double> k, std::vector<cplx> t);

  cplx operator()(double k) const;
  /// Taylor coefficients of the local interpolating cubic at k.
  std::vector<cplx> taylor(double k, int order) const;

  const std::vector<double>& k() const { return k_; }
  const std::vector<cplx>& t() const { return t_; }

 private:
  std::size_t segment(double k) const;

  std::vector<double> k_;
  std::vector<cplx> t_;
  std::vector<cplx> slope_;
};

/// Reads "k ReT [ImT]" rows, whitespace separated, '#' starts a comment.
TransmissionTable read_table(std::istream& in);
TransmissionTable read_table_file(const std::string& path);

struct Free {};
/// lambda * delta(x - L).
struct Delta {
  double lambda = 0.0;
};
/// Height v0 over a slab of width 2 * half_width (T carries exp(-2ikL)).
struct Rectangular {
  double v0 = 0.0;
  double half_width = 0.0;
};
/// -2 a^2 sech^2(a (x - L)).
struct Reflectionless {
  double a = 0.0;
};
struct WkbSmooth {
  BarrierProfile profile;
};
struct Tabulated {
  std::shared_ptr<const TransmissionTable> table;
};

enum class Kind { kFree, kDelta, kRectangular, kWkbSmooth, kReflectionless, kTabulated };

std::string to_string(Kind kind);

/// Immutable barrier description exposing T(k).
class TransmissionModel {
 public:
  using Params = std::variant<Free, Delta, Rectangular, WkbSmooth, Reflectionless, Tabulated>;

  static TransmissionModel free();
  static TransmissionModel delta(double lambda);
  static TransmissionModel rectangular(double v0, double half_width);
  static TransmissionModel reflectionless(double a);
  static TransmissionModel wkb(BarrierProfile profile);
  static TransmissionModel tabulated(TransmissionTable table);

  Kind kind() const;
  const Params& params() const { return params_; }

  /// T is a rational function of k (closed-form kernels exist).
  bool is_rational() const;
  /// T extends analytically off the real axis and has Taylor jets.
  bool is_analytic() const;
  /// Characteristic momentum: |lambda|, sqrt(V0), a, sqrt(max V); 1 for free.
  double k_char() const;

 private:
  explicit TransmissionModel(Params p) : params_(std::move(p)) {}
  Params params_;
};

/// T(k). Delta and reflectionless accept any complex k but their pole; the
/// rectangular model is entire in k except at its resonances; WKB and
/// tabulated models accept real k only.
cplx t_coeff(const TransmissionModel& model, cplx k);

/// Taylor coefficients T^(j)(k0)/j!, j = 0..order. Exact for the analytic
/// kinds, Richardson-extrapolated finite differences for WKB.
std::vector<cplx> t_taylor(const TransmissionModel& model, double k0, int order);

/// Same as t_taylor but as a Jet at a possibly complex point (analytic kinds).
Jet t_jet(const TransmissionModel& model, cplx k0, int order);

/// exp(integral over the forbidden region of sqrt(V(eta) - k^2)).
double wkb_theta(const TransmissionModel& model, double k);

std::vector<cplx> t_poles(const TransmissionModel& model);

}  // namespace transmission
}  // namespace tunnel
