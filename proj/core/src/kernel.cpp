#include "tunnel/kernel.hpp"

#include <algorithm>
#include <cmath>

#include "tunnel/errors.hpp"
#include "tunnel/jet.hpp"
#include "tunnel/quadrature.hpp"
#include "tunnel/special_fn.hpp"

namespace tunnel::kernel {
namespace {

using transmission::Kind;
constexpr cplx kI{0.0, 1.0};
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

void require_time(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("kernel: t > 0 required");
}

cplx free_phase(double x, double t) { return std::exp(kI * (x * x / (4.0 * t))); }

cplx plane_wave(cplx k, double x, double t) { return std::exp(kI * (k * x - k * k * t)); }

// Taylor jet of phi_free in (q - q0).
Jet free_jet(cplx q0, double x, double t, int order) {
  const cplx s = special_fn::sqrt_it(t);
  std::vector<cplx> w(static_cast<std::size_t>(order) + 1);
  special_fn::faddeeva_taylor(s * (x / (2.0 * t) - q0), order, w.data());
  const cplx pre = 0.5 * free_phase(x, t);
  Jet out(order, 0.0);
  cplx scale = 1.0;
  for (int j = 0; j <= order; ++j) {
    out[static_cast<std::size_t>(j)] = pre * w[static_cast<std::size_t>(j)] * scale;
    scale *= -s;
  }
  return out;
}

// (1/2pi) int dk i/(k - p) exp(ikx - ik^2 t) along the real axis, p off the
// axis (or on it with the +i0 rule). Equal to phi_free below the axis; above
// it the pole residue is removed, which w(-z) does without cancellation.
cplx line_value(cplx p, double x, double t) {
  const cplx z = special_fn::sqrt_it(t) * (x / (2.0 * t) - p);
  if (p.imag() > 0.0) return -0.5 * free_phase(x, t) * special_fn::faddeeva(-z);
  return 0.5 * free_phase(x, t) * special_fn::faddeeva(z);
}

// Re-expand a jet about a point shifted by d (|d| small compared with the
// jet's radius); keeps the first `order` + 1 coefficients.
Jet shift(const Jet& a, cplx d, int order) {
  Jet out(order, 0.0);
  for (int m = 0; m <= order; ++m) {
    cplx s = 0.0;
    double binom = 1.0;
    cplx dp = 1.0;
    for (int j = m; j <= a.order(); ++j) {
      s += a[static_cast<std::size_t>(j)] * binom * dp;
      binom = binom * (j + 1) / (j + 1 - m);
      dp *= d;
    }
    out[static_cast<std::size_t>(m)] = s;
  }
  return out;
}

// num(q) / (q - p) as a jet at q0, where num(p) = 0 may hold.
template <class Num>
Jet divide_by_linear(Num&& num, cplx q0, cplx p, int order) {
  if (std::abs(q0 - p) > 1e-6 * (1.0 + std::abs(p))) {
    return num(q0, order) / (Jet::variable(order, q0) - p);
  }
  const int extra = order + 12;
  const Jet at_p = num(p, extra + 1);
  if (std::abs(at_p[0]) > 1e-10 * (std::abs(at_p[1]) + 1e-300) * (1.0 + std::abs(p))) {
    throw PoleError("kernel: q coincides with a pole of T(k)");
  }
  Jet quotient(extra, 0.0);
  for (int j = 0; j <= extra; ++j) quotient[static_cast<std::size_t>(j)] = at_p[static_cast<std::size_t>(j + 1)];
  return shift(quotient, q0 - p, order);
}

// Partial-fraction closed forms; only for rational T.
Jet closed_jet(const TransmissionModel& model, cplx q0, double x, double t, int order) {
  switch (model.kind()) {
    case Kind::kFree: return free_jet(q0, x, t, order);
    case Kind::kDelta: {
      const double lambda = std::get<transmission::Delta>(model.params()).lambda;
      if (lambda == 0.0) return free_jet(q0, x, t, order);
      // T = k/(k - p): phi = [q phi_free(q) - p line(p)]/(q - p).
      const cplx p = -0.5 * kI * lambda;
      const cplx lp = line_value(p, x, t);
      auto num = [&](cplx at, int ord) { return Jet::variable(ord, at) * free_jet(at, x, t, ord) - p * lp; };
      return divide_by_linear(num, q0, p, order);
    }
    case Kind::kReflectionless: {
      const double a = std::get<transmission::Reflectionless>(model.params()).a;
      if (a == 0.0) return free_jet(q0, x, t, order);
      // T = (k + ia)/(k - ia): phi = phi_free(q) + 2ia [phi_free(q) - line(ia)]/(q - ia).
      const cplx p = kI * a;
      const cplx lp = line_value(p, x, t);
      auto num = [&](cplx at, int ord) { return free_jet(at, x, t, ord) - lp; };
      return free_jet(q0, x, t, order) + (2.0 * kI * a) * divide_by_linear(num, q0, p, order);
    }
    default: throw UnsupportedError("kernel: no closed form for " + transmission::to_string(model.kind()));
  }
}

void require_real_axis_model(const TransmissionModel& model) {
  if (model.kind() == Kind::kWkbSmooth) {
    throw UnsupportedError(
        "kernel: the WKB transmission is undefined above the barrier top; use the asymptotic propagator");
  }
}

// Integration range [-K, K] beyond which the integrand is handled by parts.
double cutoff(const TransmissionModel& model, cplx q, double x, double t) {
  double k = std::max({2.0 * std::abs(x) / t, 40.0 * model.k_char(), 30.0 / std::sqrt(t), 4.0 * std::abs(q)});
  if (model.kind() == Kind::kTabulated) {
    const auto& ks = std::get<transmission::Tabulated>(model.params()).table->k();
    k = std::max({k, std::abs(ks.front()), std::abs(ks.back())});
  }
  return k + 10.0;
}

// Panel edges no wider than half the local oscillation period, plus the
// given extra break points.
std::vector<double> oscillation_breaks(double kmax, double x, double t, std::vector<double> extra) {
  std::vector<double> b;
  double k = -kmax;
  while (k < kmax) {
    b.push_back(k);
    double w = kPi / (std::abs(x) + 2.0 * std::abs(k) * t);
    w = kPi / (std::abs(x) + 2.0 * (std::abs(k) + w) * t);
    k += std::min(w, 1.0);
  }
  b.push_back(kmax);
  for (double e : extra)
    if (e > -kmax && e < kmax) b.push_back(e);
  std::sort(b.begin(), b.end());
  std::vector<double> out;
  for (double v : b)
    if (out.empty() || v - out.back() > 1e-9 * kmax) out.push_back(v);
  if (out.back() != kmax) out.back() = kmax;
  return out;
}

struct Tail {
  cplx value;
  double err;
};

// int_{|k| > K} u(k) exp(ikx - ik^2 t) dk by three integrations by parts;
// the fourth term bounds the error.
template <class U>
Tail oscillatory_tails(U&& u, double kmax, double x, double t) {
  auto dphase = [&](double k) { return x - 2.0 * k * t; };
  const double h = 1e-2 * kmax;
  auto deriv = [h](auto&& f, double k) {
    return (f(k - 2 * h) - 8.0 * f(k - h) + 8.0 * f(k + h) - f(k + 2 * h)) / (12.0 * h);
  };
  auto v0 = [&](double k) { return u(k) / (kI * dphase(k)); };
  auto v1 = [&](double k) { return deriv(v0, k) / (kI * dphase(k)); };
  auto v2 = [&](double k) { return deriv(v1, k) / (kI * dphase(k)); };
  Tail out{0.0, 0.0};
  for (int side : {1, -1}) {
    const double k = side * kmax;
    // Upper tail: -e(K)(v0 - v1 + v2); lower tail: +e(-K)(v0 - v1 + v2).
    const cplx c1 = v1(k), c2 = v2(k);
    out.value += -double(side) * plane_wave(k, x, t) * (v0(k) - c1 + c2);
    out.err += std::abs(c1) > 0.0 ? std::abs(c2) * std::abs(c2) / std::abs(c1) : 0.0;
  }
  return out;
}

// int_{-K}^{K} dk / (k - q + i0), continuous branch for Im q <= 0.
cplx log_ratio(double kmax, cplx q) {
  const double im = -q.imag() > 0.0 ? -q.imag() : 0.0;
  return std::log(cplx(kmax - q.real(), im)) - std::log(cplx(-kmax - q.real(), im));
}

KernelValue quadrature_phi(const TransmissionModel& model, cplx q, double x, double t, const Options& opts) {
  require_real_axis_model(model);
  if (q.imag() > 0.0) throw DomainError("kernel quadrature: Im q <= 0 required");
  const KernelValue base = phi_free(q, x, t);
  const double kmax = cutoff(model, q, x, t);
  const double c = q.real();
  auto g = [&](double k) { return (transmission::t_coeff(model, k) - 1.0) * plane_wave(k, x, t); };
  const cplx gc = g(c);
  auto integrand = [&](double k) { return (g(k) - gc) / (k - q); };
  const double abs_tol = std::max(opts.abs_tol, 0.1 * opts.rel_tol * kTwoPi * std::abs(base.value));
  const auto breaks = oscillation_breaks(kmax, x, t, {c, 0.0});
  const auto inner = quadrature::integrate<cplx>(integrand, breaks, abs_tol, opts.rel_tol, opts.max_panels);
  const Tail tail = oscillatory_tails(
      [&](double k) { return (transmission::t_coeff(model, k) - 1.0) / (k - q); }, kmax, x, t);
  const cplx total = inner.value + gc * log_ratio(kmax, q) + tail.value;
  KernelValue out;
  out.value = base.value + kI * total / kTwoPi;
  out.method = Method::kPoleSubtractedQuadrature;
  out.err_estimate = (inner.error + tail.err) / kTwoPi + 1e-12 * std::abs(out.value);
  return out;
}

// int_{-K}^{K} (k + i0)^e dk for integer e.
cplx power_integral(int e, double kmax) {
  if (e == -1) return -kI * kPi;
  if (e % 2 != 0) return 0.0;  // odd integrand
  return 2.0 * std::pow(kmax, e + 1) / (e + 1);
}

// Estimated convergence radius of a Taylor series from its tail coefficients.
double taylor_radius(const std::vector<cplx>& c) {
  double r = 1e300;
  const int n = static_cast<int>(c.size()) - 1;
  for (int j = n / 2; j <= n; ++j) {
    const double m = std::abs(c[static_cast<std::size_t>(j)]);
    if (m > 0.0) r = std::min(r, std::pow(m, -1.0 / j));
  }
  return r;
}

// a_n for a generic T: the free part in closed form plus
// (-1)^n i^{n+1}/(2pi) int (T - 1) e(k) / (k + i0)^{n+1} dk.
std::vector<cplx> generic_series_a(const TransmissionModel& model, double x, double t, int order,
                                   const Options& opts) {
  require_real_axis_model(model);
  const Jet free = free_jet(0.0, x, t, order);
  const int taylor_order = order + 40;
  const auto tt = transmission::t_taylor(model, 0.0, taylor_order);
  Jet tj(taylor_order, 0.0);
  for (int j = 0; j <= taylor_order; ++j) tj[static_cast<std::size_t>(j)] = tt[static_cast<std::size_t>(j)];
  const Jet h = Jet::variable(taylor_order, 0.0);
  const Jet g = (tj - 1.0) * exp(kI * (x * h - t * h * h));
  const double delta = std::min({0.3 * taylor_radius(tt), 3.0 / (std::abs(x) + 1.0), 1.5 / std::sqrt(t),
                                 0.25 * model.k_char()});
  const double kmax = cutoff(model, 0.0, x, t);
  const auto breaks = oscillation_breaks(kmax, x, t, {-delta, 0.0, delta});

  std::vector<cplx> a(static_cast<std::size_t>(order) + 1);
  cplx in = 1.0;  // (-i)^n
  for (int n = 0; n <= order; ++n) {
    auto remainder = [&](double k) -> cplx {
      if (std::abs(k) < delta) {
        cplx s = 0.0;
        for (int j = taylor_order; j > n; --j) s = s * k + g[static_cast<std::size_t>(j)];
        return s;
      }
      cplx poly = 0.0;
      for (int j = n; j >= 0; --j) poly = poly * k + g[static_cast<std::size_t>(j)];
      const cplx gk = (transmission::t_coeff(model, k) - 1.0) * plane_wave(k, x, t);
      return (gk - poly) / std::pow(k, n + 1);
    };
    const double scale = std::abs(free[static_cast<std::size_t>(n)]) + 1e-300;
    const auto inner = quadrature::integrate<cplx>(remainder, breaks, std::max(opts.abs_tol, 0.1 * opts.rel_tol * scale),
                                                   opts.rel_tol, opts.max_panels);
    cplx analytic = 0.0;
    for (int j = 0; j <= n; ++j) analytic += g[static_cast<std::size_t>(j)] * power_integral(j - n - 1, kmax);
    const Tail tail = oscillatory_tails(
        [&](double k) { return (transmission::t_coeff(model, k) - 1.0) / std::pow(k, n + 1); }, kmax, x, t);
    const cplx integral = inner.value + analytic + tail.value;
    const cplx pre = in * kI / kTwoPi;
    a[static_cast<std::size_t>(n)] = std::pow(-kI, n) * free[static_cast<std::size_t>(n)] + pre * integral;
    in *= -kI;
  }
  return a;
}

}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::kClosedForm: return "closed-form";
    case Method::kPoleSubtractedQuadrature: return "pole-subtracted-quadrature";
    case Method::kSeries: return "series";
  }
  return "unknown";
}

KernelValue phi_free(cplx q, double x, double t) {
  require_time(t);
  const cplx z = special_fn::sqrt_it(t) * (x / (2.0 * t) - q);
  KernelValue out;
  out.value = 0.5 * free_phase(x, t) * special_fn::faddeeva(z);
  out.method = Method::kClosedForm;
  out.err_estimate = 1e-12 * std::abs(out.value);
  return out;
}

cplx phi_free_real_axis(cplx p, double x, double t) {
  require_time(t);
  return line_value(p, x, t);
}

KernelValue phi(const TransmissionModel& model, cplx q, double x, double t, const Options& opts) {
  require_time(t);
  if (model.is_rational() && !opts.force_quadrature) {
    KernelValue out;
    out.value = closed_jet(model, q, x, t, 0)[0];
    out.method = Method::kClosedForm;
    out.err_estimate = 1e-12 * std::abs(out.value);
    return out;
  }
  return quadrature_phi(model, q, x, t, opts);
}

std::vector<cplx> phi_q_derivatives(const TransmissionModel& model, double x, double t, int N,
                                    const Options& opts) {
  const auto a = series_a(model, x, t, N, opts).a;
  std::vector<cplx> d(a.size());
  double fact = 1.0;
  for (int n = 0; n <= N; ++n) {
    if (n > 0) fact *= n;
    d[static_cast<std::size_t>(n)] = fact * std::pow(kI, n) * a[static_cast<std::size_t>(n)];
  }
  return d;
}

SeriesCoefficients series_a(const TransmissionModel& model, double x, double t, int N, const Options& opts) {
  require_time(t);
  if (N < 0 || N > 12) throw DomainError("series_a: 0 <= N <= 12 required");
  SeriesCoefficients out;
  out.N = N;
  if (model.is_rational() && !opts.force_quadrature) {
    const Jet j = closed_jet(model, 0.0, x, t, N);
    out.a.resize(static_cast<std::size_t>(N) + 1);
    for (int n = 0; n <= N; ++n) out.a[static_cast<std::size_t>(n)] = std::pow(-kI, n) * j[static_cast<std::size_t>(n)];
  } else {
    out.a = generic_series_a(model, x, t, N, opts);
  }
  return out;
}

SeriesCoefficients series_b(const TransmissionModel& model, double x, double t, int N, int M) {
  require_time(t);
  if (N < 0 || N > 8) throw DomainError("series_b: 0 <= N <= 8 required");
  if (M < 0 || M > 6) throw DomainError("series_b: 0 <= M <= 6 required");
  const double k0 = x / (2.0 * t);
  if (!(k0 > 0.0)) throw DomainError("series_b: x/2t > 0 required");
  if (model.is_rational()) {
    for (const cplx p : transmission::t_poles(model)) {
      if (std::abs(k0 - p) < 1e-3 * std::abs(p)) throw PoleError("series_b: x/2t is too close to a pole of T(k)");
    }
  }
  const int order = 2 * M;
  const auto tt = transmission::t_taylor(model, k0, order);
  Jet tj(order, 0.0);
  for (int j = 0; j <= order; ++j) tj[static_cast<std::size_t>(j)] = tt[static_cast<std::size_t>(j)];
  const Jet inv_k = 1.0 / Jet::variable(order, k0);

  SeriesCoefficients out;
  out.N = N;
  out.M = M;
  const cplx s = special_fn::sqrt_it(t);
  Jet term = tj * inv_k;  // T(k) k^{-n-1}
  cplx sign = kI;         // (-1)^n i^{n+1}
  for (int n = 0; n <= N; ++n) {
    std::vector<cplx> row(static_cast<std::size_t>(M) + 1);
    cplx sum = 0.0;
    for (int m = 0; m <= M; ++m) {
      // s_{n,2m}/(2m)! is the Taylor coefficient of order 2m.
      const cplx coeff = term[static_cast<std::size_t>(2 * m)];
      row[static_cast<std::size_t>(m)] = term.derivative(2 * m);
      sum += coeff * std::tgamma(m + 0.5) * std::pow(s, -(2 * m + 1));
    }
    out.s.push_back(std::move(row));
    out.b.push_back(sign * sum);
    term = term * inv_k;
    sign *= -kI;
  }
  return out;
}

}  // namespace tunnel::kernel
