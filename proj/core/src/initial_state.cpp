#include "tunnel/initial_state.hpp"

#include <cmath>

#include "tunnel/errors.hpp"

namespace tunnel::initial_state {
namespace {

constexpr double kTwoPi = 6.28318530717958647692;

cplx poly(const std::vector<cplx>& c, cplx s) {
  cplx r = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * s + *it;
  return r;
}

std::vector<cplx> poly_mul(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  std::vector<cplx> r(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

}  // namespace

ExponentialSum::ExponentialSum(std::vector<ExpTerm> terms) {
  if (terms.empty()) throw DomainError("exponential sum: at least one term required");
  for (const auto& t : terms) {
    if (!std::isfinite(t.c.real()) || !std::isfinite(t.c.imag()) || !std::isfinite(t.mu.real()) ||
        !std::isfinite(t.mu.imag())) {
      throw DomainError("exponential sum: non-finite coefficient or exponent");
    }
    if (t.mu.real() < 0.0) throw DomainError("exponential sum: Re(mu) >= 0 required");
    bool merged = false;
    for (auto& existing : terms_) {
      if (existing.mu == t.mu) {
        existing.c += t.c;
        merged = true;
        break;
      }
    }
    if (!merged) terms_.push_back(t);
  }
}

cplx ExponentialSum::operator()(double x) const {
  if (x > 0.0) return 0.0;
  cplx s = 0.0;
  for (const auto& t : terms_) s += t.c * std::exp(t.mu * x);
  return s;
}

bool ExponentialSum::decaying() const {
  for (const auto& t : terms_)
    if (!(t.mu.real() > 0.0)) return false;
  return true;
}

ExponentialSum operator+(const ExponentialSum& a, const ExponentialSum& b) {
  std::vector<ExpTerm> all = a.terms_;
  all.insert(all.end(), b.terms_.begin(), b.terms_.end());
  return ExponentialSum(std::move(all));
}

ExponentialSum operator*(cplx s, const ExponentialSum& a) {
  std::vector<ExpTerm> all = a.terms_;
  for (auto& t : all) t.c *= s;
  return ExponentialSum(std::move(all));
}

cplx derivative_at_zero(const ExponentialSum& f, int n) {
  if (n < 0) throw DomainError("derivative order must be >= 0");
  cplx s = 0.0;
  for (const auto& t : f.terms()) s += t.c * std::pow(t.mu, n);
  return s;
}

cplx derivative_at_zero(const InitialState& f, int n) {
  if (const auto* e = std::get_if<ExponentialSum>(&f)) return derivative_at_zero(*e, n);
  const auto& d = std::get<BoundaryDerivatives>(f).values;
  if (n < 0) throw DomainError("derivative order must be >= 0");
  return static_cast<std::size_t>(n) < d.size() ? d[static_cast<std::size_t>(n)] : cplx(0.0);
}

cplx fourier_transform(const ExponentialSum& f, cplx q) {
  cplx s = 0.0;
  for (const auto& t : f.terms()) {
    const cplx rate = t.mu - cplx(0.0, 1.0) * q;
    if (!(rate.real() > 0.0)) {
      throw DivergenceError("fourier_transform: half-line integral diverges (Re(mu - iq) <= 0)");
    }
    s += t.c / rate;
  }
  return s / kTwoPi;
}

cplx RationalFunction::operator()(cplx s) const {
  const cplx den = poly(denominator, s);
  if (den == 0.0) throw PoleError("rational function evaluated at a pole");
  return poly(numerator, s) / den;
}

RationalFunction operator*(const RationalFunction& a, const RationalFunction& b) {
  return {poly_mul(a.numerator, b.numerator), poly_mul(a.denominator, b.denominator)};
}

ExponentialSum resolvent_apply(const RationalFunction& g, const ExponentialSum& f) {
  std::vector<ExpTerm> out;
  for (const auto& t : f.terms()) {
    cplx factor;
    try {
      factor = g(t.mu);
    } catch (const PoleError&) {
      throw PoleError("resolvent_apply: exponent mu is a pole of the operator function");
    }
    out.push_back({t.c * factor, t.mu});
  }
  return ExponentialSum(std::move(out));
}

}  // namespace tunnel::initial_state
