#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace tunnel {

using cplx = std::complex<double>;

/// Truncated Taylor series sum_j c_j h^j around an expansion point; all
/// arithmetic is exact to the truncation order. Used wherever the solver
/// needs high-order derivatives of closed forms (s_{n,2m}, d^n phi/dq^n).
class Jet {
 public:
  Jet() = default;
  Jet(int order, cplx constant);

  static Jet variable(int order, cplx at);

  int order() const { return static_cast<int>(c_.size()) - 1; }
  cplx operator[](std::size_t j) const { return c_[j]; }
  cplx& operator[](std::size_t j) { return c_[j]; }
  const std::vector<cplx>& coeffs() const { return c_; }

  /// j-th derivative at the expansion point, j! * c_j.
  cplx derivative(int j) const;

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(cplx s);

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator/(const Jet& a, const Jet& b);
  friend Jet operator*(Jet a, cplx s) { return a *= s; }
  friend Jet operator*(cplx s, Jet a) { return a *= s; }
  friend Jet operator+(Jet a, cplx s) { a.c_[0] += s; return a; }
  friend Jet operator+(cplx s, Jet a) { a.c_[0] += s; return a; }
  friend Jet operator-(Jet a, cplx s) { a.c_[0] -= s; return a; }
  friend Jet operator-(cplx s, const Jet& a) { return Jet(a.order(), s) - a; }
  friend Jet operator/(cplx s, const Jet& a) { return Jet(a.order(), s) / a; }
  Jet operator-() const;

  /// f(a(h)) where f's Taylor coefficients at a(0) are given.
  Jet compose(const std::vector<cplx>& outer) const;

 private:
  std::vector<cplx> c_;
};

Jet exp(const Jet& a);
Jet sqrt(const Jet& a);
Jet cosh(const Jet& a);
Jet sinh(const Jet& a);
Jet pow(const Jet& a, int n);

}  // namespace tunnel
