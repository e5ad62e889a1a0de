#pragma once

#include <complex>
#include <string>
#include <vector>

#include "tunnel/transmission.hpp"

namespace tunnel::kernel {

using transmission::TransmissionModel;

enum class Method { kClosedForm, kPoleSubtractedQuadrature, kSeries };
std::string to_string(Method m);

struct KernelValue {
  cplx value;
  Method method = Method::kClosedForm;
  double err_estimate = 0.0;
};

struct Options {
  /// Use the quadrature path even when a closed form exists.
  bool force_quadrature = false;
  double rel_tol = 1e-11;
  double abs_tol = 1e-300;
  std::size_t max_panels = 400000;
};

struct SeriesCoefficients {
  std::vector<cplx> a;
  std::vector<cplx> b;
  /// s[n][m] = d^{2m}/dk^{2m} [T(k) k^{-n-1}] at k = x/2t.
  std::vector<std::vector<cplx>> s;
  int N = 0;
  int M = 0;
};

inline constexpr int kDefaultOrder = 6;
inline constexpr int kDefaultInnerOrder = 3;

/// 1/2 exp(ix^2/4t) w(sqrt(it)(x/2t - q)), the free field released from
/// exp(iqx) on x < 0. Analytic in q.
KernelValue phi_free(cplx q, double x, double t);

/// (1/2pi) int dk i/(k - p) exp(ikx - ik^2 t) taken along the real axis.
/// Equals phi_free(p) for Im p <= 0; above the axis the pole residue
/// exp(ipx - ip^2 t) is absent.
cplx phi_free_real_axis(cplx p, double x, double t);

/// phi(q,x,t) = (1/2pi) int dk i T(k)/(k - q + i0) exp(ikx - ik^2 t).
///
/// Free, delta and reflectionless models use their partial-fraction closed
/// forms; other kinds integrate T - 1 along the real axis (Im q <= 0 only).
KernelValue phi(const TransmissionModel& model, cplx q, double x, double t, const Options& opts = {});

/// phi and its first N q-derivatives at q = 0.
std::vector<cplx> phi_q_derivatives(const TransmissionModel& model, double x, double t, int N,
                                    const Options& opts = {});

/// a_n = (-i)^n phi^(n)(0,x,t)/n!, so that psi = sum_n a_n f^(n)(0).
SeriesCoefficients series_a(const TransmissionModel& model, double x, double t, int N = kDefaultOrder,
                            const Options& opts = {});

/// Stationary-phase coefficients b_n around k = x/2t, with
/// psi ~ (1/2pi) exp(ix^2/4t) sum_n b_n f^(n)(0).
SeriesCoefficients series_b(const TransmissionModel& model, double x, double t, int N = kDefaultOrder,
                            int M = kDefaultInnerOrder);

}  // namespace tunnel::kernel
