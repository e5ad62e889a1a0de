#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <queue>
#include <utility>
#include <vector>

#include "tunnel/errors.hpp"

namespace tunnel::quadrature {

template <class R>
struct Result {
  R value{};
  double error = 0.0;
  int evaluations = 0;
};

namespace detail {

// Gauss-Kronrod 7/15 abscissae and weights (QUADPACK qk15).
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }

template <class R, class F>
Result<R> gk15(F&& f, double a, double b) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const R fc = f(centre);
  R kronrod = fc * kWgk[7];
  R gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[static_cast<std::size_t>(j)];
    const R f1 = f(centre - dx);
    const R f2 = f(centre + dx);
    kronrod += (f1 + f2) * kWgk[static_cast<std::size_t>(j)];
    if (j % 2 == 1) gauss += (f1 + f2) * kWg[static_cast<std::size_t>(j / 2)];
  }
  Result<R> r;
  r.value = kronrod * half;
  r.error = magnitude((kronrod - gauss) * half);
  r.evaluations = 15;
  return r;
}

template <class R>
struct Panel {
  double a, b;
  Result<R> r;
  bool operator<(const Panel& o) const { return r.error < o.r.error; }
};

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) integration over the initial
/// panels given by `breaks` (sorted, at least two entries). The panel with
/// the largest error estimate is bisected until the summed estimate meets
/// max(abs_tol, rel_tol * |integral|).
template <class R, class F>
Result<R> integrate(F&& f, const std::vector<double>& breaks, double abs_tol, double rel_tol,
                    int max_panels = 200000) {
  std::priority_queue<detail::Panel<R>> heap;
  Result<R> total;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (!(breaks[i + 1] > breaks[i])) continue;
    auto r = detail::gk15<R>(f, breaks[i], breaks[i + 1]);
    total.value += r.value;
    total.error += r.error;
    total.evaluations += r.evaluations;
    heap.push({breaks[i], breaks[i + 1], r});
  }
  while (!heap.empty()) {
    const double target = std::max(abs_tol, rel_tol * detail::magnitude(total.value));
    if (total.error <= target) break;
    if (static_cast<int>(heap.size()) >= max_panels) {
      throw QuadratureError("adaptive quadrature: panel budget exhausted");
    }
    auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      throw QuadratureError("adaptive quadrature: interval collapsed");
    }
    auto left = detail::gk15<R>(f, worst.a, mid);
    auto right = detail::gk15<R>(f, mid, worst.b);
    total.value += left.value + right.value - worst.r.value;
    total.error += left.error + right.error - worst.r.error;
    total.evaluations += left.evaluations + right.evaluations;
    heap.push({worst.a, mid, left});
    heap.push({mid, worst.b, right});
  }
  // Re-sum to shed the accumulated cancellation of the running update.
  R sum{};
  double err = 0.0;
  while (!heap.empty()) {
    sum += heap.top().r.value;
    err += heap.top().r.error;
    heap.pop();
  }
  total.value = sum;
  total.error = err;
  return total;
}

template <class R, class F>
Result<R> integrate(F&& f, double a, double b, double abs_tol, double rel_tol,
                    int max_panels = 200000) {
  return integrate<R>(std::forward<F>(f), std::vector<double>{a, b}, abs_tol, rel_tol, max_panels);
}

}  // namespace tunnel::quadrature
