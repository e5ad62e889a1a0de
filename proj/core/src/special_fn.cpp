#include "tunnel/special_fn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "tunnel/errors.hpp"

namespace tunnel::special_fn {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr cplx kI{0.0, 1.0};

// Beyond this radius the asymptotic (Laplace) series is accurate to e^{-|z|^2}.
constexpr double kAsymptoticRadius = 7.0;
// Trapezoid spacing; aliasing error is O(exp(-pi^2/h^2)) ~ 7e-18.
constexpr double kStep = 0.5;
constexpr int kNodes = 16;

cplx asymptotic_upper(cplx z) {
  const cplx inv2z2 = 1.0 / (2.0 * z * z);
  cplx term = 1.0;
  cplx sum = 1.0;
  double prev = std::numeric_limits<double>::infinity();
  for (int n = 1; n < 400; ++n) {
    term *= static_cast<double>(2 * n - 1) * inv2z2;
    const double mag = std::abs(term);
    if (mag > prev) break;
    sum += term;
    if (mag < 1e-18 * std::abs(sum)) break;
    prev = mag;
  }
  return kI * sum / (kSqrtPi * z);
}

// Trapezoidal rule for (i/pi) int exp(-t^2)/(z-t) dt with the pole
// correction that makes it exact up to aliasing (Hunter-Regan form).
// Two node sets are available; the one farther from z avoids cancellation
// between the node term and the correction term.
cplx trapezoid_upper(cplx z) {
  const double x = z.real();
  const double frac = x / kStep - std::floor(x / kStep);
  const bool shifted = (frac < 0.25 || frac > 0.75);
  const double offset = shifted ? 0.5 : 0.0;

  cplx sum = 0.0;
  for (int n = -kNodes; n <= kNodes; ++n) {
    const double tn = (n + offset) * kStep;
    sum += std::exp(-tn * tn) / (z - tn);
  }
  sum *= kI * kStep / kPi;

  // exp(-z^2) * E / (E -+ 1) with E = exp(2 pi i z / h), |E| <= 1 for Im z >= 0.
  const cplx expo = -z * z + 2.0 * kPi * kI * z / kStep;
  const cplx e_big = std::exp(2.0 * kPi * kI * z / kStep);
  const cplx corr = 2.0 * std::exp(expo) / (shifted ? (e_big + 1.0) : (e_big - 1.0));
  return sum + corr;
}

cplx faddeeva_upper(cplx z) {
  if (std::abs(z) >= kAsymptoticRadius) return asymptotic_upper(z);
  return trapezoid_upper(z);
}

}  // namespace

cplx faddeeva(cplx z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw DomainError("faddeeva: non-finite argument");
  }
  if (z == 0.0) return 1.0;
  if (z.imag() >= 0.0) return faddeeva_upper(z);
  const cplx mz2 = -z * z;
  if (mz2.real() > 700.0) {
    throw OverflowError("faddeeva: exp(-z^2) overflows in the lower half plane");
  }
  return 2.0 * std::exp(mz2) - faddeeva_upper(-z);
}

cplx faddeeva_derivative(cplx z) {
  return -2.0 * z * faddeeva(z) + 2.0 * kI / kSqrtPi;
}

namespace {

// Taylor coefficients of exp(-(z+h)^2) = exp(-z^2) exp(-2zh) exp(-h^2).
std::vector<cplx> gaussian_taylor(cplx z, int order) {
  const cplx g0 = std::exp(-z * z);
  if (!std::isfinite(g0.real()) || !std::isfinite(g0.imag())) {
    throw OverflowError("faddeeva_taylor: exp(-z^2) overflows");
  }
  std::vector<cplx> lin(static_cast<std::size_t>(order) + 1);
  lin[0] = 1.0;
  for (int n = 1; n <= order; ++n) lin[n] = lin[n - 1] * (-2.0 * z) / static_cast<double>(n);
  std::vector<cplx> out(lin.size());
  for (int n = 0; n <= order; ++n) {
    cplx g = 0.0;
    double quad = 1.0;  // (-1)^m / m!
    for (int m = 0; 2 * m <= n; ++m) {
      g += quad * lin[n - 2 * m];
      quad *= -1.0 / (m + 1);
    }
    out[n] = g0 * g;
  }
  return out;
}

// Trapezoid rule for the Cauchy integral of f on |zeta - z| = r.
template <class F>
void cauchy_taylor(F&& f, cplx z, double r, int order, cplx* out) {
  const int nodes = std::max(64, 4 * (order + 1));
  std::vector<cplx> acc(static_cast<std::size_t>(order) + 1, 0.0);
  for (int j = 0; j < nodes; ++j) {
    const cplx rot = std::polar(1.0, -2.0 * kPi * j / nodes);
    const cplx val = f(z + r * std::conj(rot));
    cplx phase = 1.0;
    for (int n = 0; n <= order; ++n) {
      acc[n] += val * phase;
      phase *= rot;
    }
  }
  double rn = 1.0;
  for (int n = 0; n <= order; ++n) {
    out[n] = acc[n] / (nodes * rn);
    rn *= r;
  }
}

// Largest r <= r_max with Re(zeta^2) >= 32 on the whole circle |zeta - z| = r,
// so that the Gaussian growth of w - exp(-zeta^2) beyond it cannot alias
// into the trapezoid sums. Returns 0 if there is none.
double dawson_radius(cplx z, double r_max) {
  const double x = std::abs(z.real());
  const double y = std::abs(z.imag());
  constexpr double kMargin = 32.0;
  auto ok = [&](double r) {
    for (int j = 0; j < 128; ++j) {
      const double th = 2.0 * kPi * j / 128.0;
      const double px = x + r * std::cos(th);
      const double py = y + r * std::sin(th);
      if (px * px - py * py < kMargin) return false;
    }
    return true;
  };
  if (!ok(0.0)) return 0.0;
  if (ok(r_max)) return r_max;
  double lo = 0.0, hi = r_max;
  for (int it = 0; it < 30; ++it) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace

void faddeeva_taylor(cplx z, int order, cplx* out) {
  if (order < 0) return;
  if (order == 0) {
    out[0] = faddeeva(z);
    return;
  }
  if (z.imag() < 0.0) {
    faddeeva_taylor(-z, order, out);
    const auto g = gaussian_taylor(z, order);
    for (int n = 0; n <= order; ++n) out[n] = 2.0 * g[n] - ((n % 2 == 0) ? out[n] : -out[n]);
    return;
  }
  // The circle must stay where the integrand is bounded: w itself is bounded
  // in the upper half plane, while w - exp(-z^2) (a Dawson function) is
  // small where Re(z^2) is large. Take whichever region allows the larger
  // radius; a larger radius means less cancellation in the high-order
  // coefficients.
  const double a = std::abs(z);
  const double r_w = std::min(0.5 * a, z.imag() + 1.0);
  const double r_d = dawson_radius(z, 0.5 * a);
  if (r_d > r_w && r_d > 1.0) {
    cauchy_taylor([](cplx s) { return faddeeva(s) - std::exp(-s * s); }, z, r_d, order, out);
    const auto g = gaussian_taylor(z, order);
    for (int n = 0; n <= order; ++n) out[n] += g[n];
  } else {
    cauchy_taylor([](cplx s) { return faddeeva(s); }, z, std::max(1.0, r_w), order, out);
  }
  out[0] = faddeeva(z);
}

cplx erfc(cplx z) {
  return std::exp(-z * z) * faddeeva(kI * z);
}

cplx sqrt_it(double t) {
  if (!(t > 0.0)) throw DomainError("sqrt_it: t > 0 required");
  const double s = std::sqrt(t) * 0.70710678118654752440;
  return {s, s};
}

}  // namespace tunnel::special_fn
