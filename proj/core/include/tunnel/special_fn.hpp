#pragma once

#include <complex>

namespace tunnel {

using cplx = std::complex<double>;

namespace special_fn {

inline constexpr double kSqrtPi = 1.7724538509055160273;

/// Faddeeva function w(z) = exp(-z^2) erfc(-iz).
///
/// Relative accuracy is better than 1e-12 for |z| <= 50. In the lower half
/// plane the value is obtained from w(z) = 2 exp(-z^2) - w(-z) and an
/// OverflowError is raised when exp(-z^2) is not representable.
cplx faddeeva(cplx z);

/// Derivative w'(z) = -2 z w(z) + 2i/sqrt(pi).
cplx faddeeva_derivative(cplx z);

/// Taylor coefficients w^(j)(z)/j!, j = 0..order. The derivative recurrence
/// w^(n+1) = -2 z w^(n) - 2 n w^(n-1) is unstable, so the coefficients come
/// from a Cauchy integral on a circle around z; absolute accuracy is about
/// 1e-15 max|w| / r^j with r = max(1, |z|/2).
void faddeeva_taylor(cplx z, int order, cplx* out);

/// erfc of a complex argument, erfc(z) = exp(-z^2) w(iz).
cplx erfc(cplx z);

/// sqrt(i t) on the principal branch: sqrt(t) * exp(i pi / 4). Requires t > 0.
cplx sqrt_it(double t);

}  // namespace special_fn
}  // namespace tunnel
