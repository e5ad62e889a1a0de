#pragma once

#include <complex>
#include <variant>
#include <vector>

namespace tunnel {

using cplx = std::complex<double>;

namespace initial_state {

/// c * exp(mu * x) on x <= 0.
struct ExpTerm {
  cplx c;
  cplx mu;
};

/// Initial profile f(x) = sum_j c_j exp(mu_j x) on x <= 0 (zero for x > 0).
///
/// Re(mu_j) >= 0 keeps f bounded on the half line; mu = 0 is the constant
/// (shutter) case and a purely imaginary mu a truncated plane wave. Terms
/// with equal exponents are merged on construction.
class ExponentialSum {
 public:
  explicit ExponentialSum(std::vector<ExpTerm> terms);

  static ExponentialSum constant(cplx c) { return ExponentialSum({{c, 0.0}}); }
  static ExponentialSum exponential(cplx c, cplx mu) { return ExponentialSum({{c, mu}}); }

  const std::vector<ExpTerm>& terms() const { return terms_; }
  cplx operator()(double x) const;
  /// Every term decays towards -infinity (Re mu_j > 0).
  bool decaying() const;

  friend ExponentialSum operator+(const ExponentialSum& a, const ExponentialSum& b);
  friend ExponentialSum operator*(cplx s, const ExponentialSum& a);

 private:
  std::vector<ExpTerm> terms_;
};

/// Arbitrary profile known only through f(0), f'(0), ..., f^(N)(0).
struct BoundaryDerivatives {
  std::vector<cplx> values;
};

using InitialState = std::variant<ExponentialSum, BoundaryDerivatives>;

cplx derivative_at_zero(const ExponentialSum& f, int n);
/// Derivative of either representation; zero beyond the supplied order.
cplx derivative_at_zero(const InitialState& f, int n);

/// F(q) = (2 pi)^-1 int_{x<0} f(x) exp(-iqx) dx = (2 pi)^-1 sum_j c_j / (mu_j - iq).
/// Throws DivergenceError when Re(mu_j - iq) <= 0 for some term.
cplx fourier_transform(const ExponentialSum& f, cplx q);

/// Rational function g(s) = P(s)/Q(s), coefficients in increasing powers.
struct RationalFunction {
  std::vector<cplx> numerator;
  std::vector<cplx> denominator{1.0};

  cplx operator()(cplx s) const;
  friend RationalFunction operator*(const RationalFunction& a, const RationalFunction& b);
};

/// g(d/dxi) applied to f: each term's coefficient becomes c_j g(mu_j).
/// Throws PoleError when some mu_j is a pole of g.
ExponentialSum resolvent_apply(const RationalFunction& g, const ExponentialSum& f);

}  // namespace initial_state
}  // namespace tunnel
