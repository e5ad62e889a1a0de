#include "tunnel/jet.hpp"

#include <algorithm>
#include <cmath>

#include "tunnel/errors.hpp"

namespace tunnel {

Jet::Jet(int order, cplx constant) : c_(static_cast<std::size_t>(order) + 1, 0.0) {
  c_[0] = constant;
}

Jet Jet::variable(int order, cplx at) {
  Jet j(order, at);
  if (order >= 1) j.c_[1] = 1.0;
  return j;
}

cplx Jet::derivative(int j) const {
  double fact = 1.0;
  for (int i = 2; i <= j; ++i) fact *= i;
  return fact * c_[static_cast<std::size_t>(j)];
}

Jet& Jet::operator+=(const Jet& o) {
  for (std::size_t j = 0; j < c_.size(); ++j) c_[j] += o.c_[j];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  for (std::size_t j = 0; j < c_.size(); ++j) c_[j] -= o.c_[j];
  return *this;
}

Jet& Jet::operator*=(cplx s) {
  for (auto& v : c_) v *= s;
  return *this;
}

Jet Jet::operator-() const {
  Jet r = *this;
  for (auto& v : r.c_) v = -v;
  return r;
}

Jet operator*(const Jet& a, const Jet& b) {
  const int n = a.order();
  Jet r(n, 0.0);
  for (int i = 0; i <= n; ++i) {
    if (a.c_[i] == 0.0) continue;
    for (int j = 0; i + j <= n; ++j) r.c_[i + j] += a.c_[i] * b.c_[j];
  }
  return r;
}

Jet operator/(const Jet& a, const Jet& b) {
  if (b.c_[0] == 0.0) throw PoleError("Jet division by a series with zero constant term");
  const int n = a.order();
  Jet r(n, 0.0);
  for (int k = 0; k <= n; ++k) {
    cplx s = a.c_[k];
    for (int j = 1; j <= k; ++j) s -= b.c_[j] * r.c_[k - j];
    r.c_[k] = s / b.c_[0];
  }
  return r;
}

Jet Jet::compose(const std::vector<cplx>& outer) const {
  // Horner in the increment d = a - a(0).
  Jet d = *this;
  d.c_[0] = 0.0;
  const int n = order();
  Jet r(n, 0.0);
  const int m = std::min<int>(static_cast<int>(outer.size()) - 1, n);
  for (int j = m; j >= 0; --j) {
    r = r * d;
    r.c_[0] += outer[static_cast<std::size_t>(j)];
  }
  return r;
}

Jet exp(const Jet& a) {
  // r' = a' r
  const int n = a.order();
  Jet r(n, std::exp(a[0]));
  for (int k = 1; k <= n; ++k) {
    cplx s = 0.0;
    for (int j = 1; j <= k; ++j) s += static_cast<double>(j) * a[j] * r[k - j];
    r[k] = s / static_cast<double>(k);
  }
  return r;
}

Jet sqrt(const Jet& a) {
  if (a[0] == 0.0) throw DomainError("Jet sqrt at a branch point");
  const int n = a.order();
  Jet r(n, std::sqrt(a[0]));
  for (int k = 1; k <= n; ++k) {
    cplx s = a[k];
    for (int j = 1; j < k; ++j) s -= r[j] * r[k - j];
    r[k] = s / (2.0 * r[0]);
  }
  return r;
}

Jet cosh(const Jet& a) {
  const Jet e = exp(a);
  const Jet em = exp(-a);
  return (e + em) * 0.5;
}

Jet sinh(const Jet& a) {
  const Jet e = exp(a);
  const Jet em = exp(-a);
  return (e - em) * 0.5;
}

Jet pow(const Jet& a, int n) {
  if (n < 0) return Jet(a.order(), 1.0) / pow(a, -n);
  Jet r(a.order(), 1.0);
  for (int i = 0; i < n; ++i) r = r * a;
  return r;
}

}  // namespace tunnel
