#include "tunnel/propagator.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tunnel/errors.hpp"
#include "tunnel/special_fn.hpp"

namespace tunnel::propagator {
namespace {

constexpr cplx kI{0.0, 1.0};
constexpr double kPi = 3.14159265358979323846;

using initial_state::derivative_at_zero;
using initial_state::RationalFunction;
using initial_state::resolvent_apply;

double large_distance_ratio(double x, double t) { return x * x / (4.0 * t); }

template <class F>
void fill(WaveField& field, F&& point) {
  for (std::size_t it = 0; it < field.ts.size(); ++it) {
    for (std::size_t ix = 0; ix < field.xs.size(); ++ix) {
      double err = 0.0;
      const std::size_t i = field.index(it, ix);
      field.psi[i] = point(field.xs[ix], field.ts[it], err);
      field.err[i] = err;
      if (!std::isfinite(field.psi[i].real()) || !std::isfinite(field.psi[i].imag())) {
        std::ostringstream msg;
        msg << field.method << ": non-finite psi at x=" << field.xs[ix] << ", t=" << field.ts[it];
        throw OverflowError(msg.str());
      }
    }
  }
}

int max_order(const InitialState& f, int requested) {
  if (const auto* d = std::get_if<initial_state::BoundaryDerivatives>(&f)) {
    return std::min(requested, static_cast<int>(d->values.size()) - 1);
  }
  return requested;
}

// True when every derivative beyond f(0) vanishes identically (all mu = 0),
// so a truncated series in f^(n)(0) is exact in n.
bool derivatives_terminate(const InitialState& f) {
  const auto* e = std::get_if<ExponentialSum>(&f);
  if (e == nullptr) return false;
  for (const auto& term : e->terms()) {
    if (term.mu != 0.0) return false;
  }
  return true;
}

// Magnitude of the residue terms the stationary-phase series omits: poles of
// T lying between the real axis and the steepest-descent line through
// k0 = x/2t (direction e^{-i pi/4}). Exponentially small when present.
double crossed_pole_bound(const TransmissionModel& model, double x, double t, const std::vector<cplx>& d) {
  if (!model.is_rational()) return 0.0;
  const double k0 = x / (2.0 * t);
  double bound = 0.0;
  for (const cplx p : transmission::t_poles(model)) {
    const bool crossed = (p.imag() > 0.0 && p.imag() < k0 - p.real()) ||
                         (p.imag() < 0.0 && -p.imag() < p.real() - k0);
    if (!crossed || p == 0.0) continue;
    // Res T = 1 / (1/T)'(p); 1/T is analytic and vanishes at p.
    const cplx h = 1e-4 * std::abs(p);
    const cplx dinv = (1.0 / transmission::t_coeff(model, p + h) - 1.0 / transmission::t_coeff(model, p - h)) / (2.0 * h);
    const cplx res = 1.0 / dinv;
    const cplx e = std::exp(kI * (p * x - p * p * t));
    cplx sum = 0.0, pw = 1.0 / p;
    for (const cplx dn : d) {
      sum += dn * pw;
      pw /= -p;
    }
    bound += std::abs(res * e * sum);
  }
  return bound;
}

}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::kAuto: return "auto";
    case Method::kClosed: return "closed";
    case Method::kSeries: return "series";
    case Method::kBSeries: return "b-series";
    case Method::kAsymptotic: return "asymptotic";
    case Method::kQuadrature: return "quadrature";
    case Method::kOracle: return "oracle";
  }
  return "unknown";
}

Method method_from_string(const std::string& name) {
  for (Method m : {Method::kAuto, Method::kClosed, Method::kSeries, Method::kBSeries, Method::kAsymptotic,
                   Method::kQuadrature, Method::kOracle}) {
    if (to_string(m) == name) return m;
  }
  throw DomainError("unknown method '" + name + "'");
}

void Grid::validate() const {
  if (xs.empty() || ts.empty()) throw DomainError("grid: xs and ts must be nonempty");
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (!(ts[i] > 0.0) || !std::isfinite(ts[i])) {
      std::ostringstream msg;
      msg << "grid: t > 0 required (ts[" << i << "] = " << ts[i] << ")";
      throw DomainError(msg.str());
    }
    if (i > 0 && !(ts[i] > ts[i - 1])) throw DomainError("grid: ts must be strictly increasing");
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > barrier_edge) || !std::isfinite(xs[i])) {
      std::ostringstream msg;
      msg << "grid: x must lie beyond the barrier edge " << barrier_edge << " (xs[" << i << "] = " << xs[i] << ")";
      throw DomainError(msg.str());
    }
    if (i > 0 && !(xs[i] > xs[i - 1])) throw DomainError("grid: xs must be strictly increasing");
  }
}

WaveField::WaveField(const Grid& grid, std::string method_name)
    : xs(grid.xs), ts(grid.ts), psi(grid.xs.size() * grid.ts.size()), err(psi.size(), 0.0),
      method(std::move(method_name)) {
  grid.validate();
}

WaveField propagate_series(const TransmissionModel& model, const InitialState& f, const Grid& grid, int N,
                           const kernel::Options& opts) {
  WaveField field(grid, "series");
  const int order = max_order(f, N);
  const bool terminates = derivatives_terminate(f);
  std::vector<cplx> d(static_cast<std::size_t>(order) + 1);
  for (int n = 0; n <= order; ++n) d[static_cast<std::size_t>(n)] = derivative_at_zero(f, n);
  fill(field, [&](double x, double t, double& err) {
    const auto a = kernel::series_a(model, x, t, order, opts).a;
    cplx sum = 0.0;
    for (int n = 0; n <= order; ++n) sum += a[static_cast<std::size_t>(n)] * d[static_cast<std::size_t>(n)];
    // The last retained term only counts as truncation error once the
    // derivatives stop being identically zero.
    cplx last = 0.0;
    for (int n = order; n >= 1; --n) {
      if (d[static_cast<std::size_t>(n)] != 0.0) {
        last = a[static_cast<std::size_t>(n)] * d[static_cast<std::size_t>(n)];
        break;
      }
    }
    err = (terminates ? 0.0 : std::abs(last)) + 1e-12 * std::abs(sum);
    return sum;
  });
  return field;
}

WaveField propagate_closed_delta(double lambda, const ExponentialSum& f, const Grid& grid) {
  if (lambda == 0.0) return propagate_closed_free(f, grid);
  WaveField field(grid, "closed");
  const double h = 0.5 * lambda;
  // With T = k/(k + i lambda/2): psi = g1(d) phi_free(-i d) f - g2(d) f * phi_axis(-i lambda/2)
  // where g1(s) = s/(s - lambda/2) and g2(s) = (lambda/2)/(s - lambda/2).
  const ExponentialSum f1 = resolvent_apply(RationalFunction{{0.0, 1.0}, {-h, 1.0}}, f);
  const ExponentialSum f2 = resolvent_apply(RationalFunction{{h}, {-h, 1.0}}, f);
  fill(field, [&](double x, double t, double& err) {
    cplx sum = 0.0;
    for (const auto& term : f1.terms()) sum += term.c * kernel::phi_free(-kI * term.mu, x, t).value;
    cplx g2 = 0.0;
    for (const auto& term : f2.terms()) g2 += term.c;
    if (g2 != 0.0) sum -= g2 * kernel::phi_free_real_axis(-kI * h, x, t);
    err = 1e-12 * std::abs(sum);
    return sum;
  });
  return field;
}

WaveField propagate_closed_reflectionless(double a, const ExponentialSum& f, const Grid& grid) {
  WaveField field(grid, "closed");
  // phi(q) = phi_free(q) + 2ia/(q - ia) [phi_free(q) - phi_axis(ia)] with q -> -i d:
  // 2ia/(-i s - ia) = -2a/(s + a).
  const ExponentialSum g = resolvent_apply(RationalFunction{{-2.0 * a}, {a, 1.0}}, f);
  fill(field, [&](double x, double t, double& err) {
    const cplx bound = kernel::phi_free_real_axis(kI * a, x, t);
    cplx sum = 0.0;
    const auto& fs = f.terms();
    const auto& gs = g.terms();
    for (std::size_t j = 0; j < fs.size(); ++j) {
      const cplx pf = kernel::phi_free(-kI * fs[j].mu, x, t).value;
      sum += fs[j].c * pf + gs[j].c * (pf - bound);
    }
    err = 1e-12 * std::abs(sum);
    return sum;
  });
  return field;
}

WaveField propagate_closed_free(const ExponentialSum& f, const Grid& grid) {
  WaveField field(grid, "closed");
  fill(field, [&](double x, double t, double& err) {
    cplx sum = 0.0;
    for (const auto& term : f.terms()) sum += term.c * kernel::phi_free(-kI * term.mu, x, t).value;
    err = 1e-12 * std::abs(sum);
    return sum;
  });
  return field;
}

WaveField propagate_closed(const TransmissionModel& model, const ExponentialSum& f, const Grid& grid) {
  using transmission::Kind;
  switch (model.kind()) {
    case Kind::kFree: return propagate_closed_free(f, grid);
    case Kind::kDelta: return propagate_closed_delta(std::get<transmission::Delta>(model.params()).lambda, f, grid);
    case Kind::kReflectionless:
      return propagate_closed_reflectionless(std::get<transmission::Reflectionless>(model.params()).a, f, grid);
    default:
      throw UnsupportedError("closed form not available for the " + transmission::to_string(model.kind()) +
                             " model");
  }
}

WaveField propagate_asymptotic(const TransmissionModel& model, const InitialState& f, const Grid& grid,
                               bool strict) {
  WaveField field(grid, "asymptotic");
  const cplx f0 = derivative_at_zero(f, 0);
  double worst = 1e300;
  for (double t : grid.ts)
    for (double x : grid.xs) worst = std::min(worst, large_distance_ratio(x, t));
  if (worst < 25.0) {
    std::ostringstream msg;
    msg << "asymptotic: x^2/4t = " << worst << " < 25 on part of the grid; leading term is unreliable there";
    if (strict) throw RegimeError(msg.str());
    field.warnings.push_back(msg.str());
  } else if (worst < 100.0) {
    std::ostringstream msg;
    msg << "asymptotic: x^2/4t = " << worst << " < 100 on part of the grid; expect percent-level error";
    field.warnings.push_back(msg.str());
  }
  const cplx f1 = derivative_at_zero(f, 1);
  fill(field, [&](double x, double t, double& err) {
    const double k0 = x / (2.0 * t);
    std::vector<cplx> tay;
    try {
      tay = transmission::t_taylor(model, k0, 2);
    } catch (const BranchError&) {
      // The difference stencil crosses the barrier top; T itself still exists.
      tay = {transmission::t_coeff(model, k0), 0.0, cplx(INFINITY)};
    }
    const cplx amp = std::sqrt(kI * t / kPi) * std::exp(kI * (x * x / (4.0 * t))) / x;
    const cplx psi = tay[0] * amp * f0;
    // First neglected corrections: the shutter tail 2t/x^2, the boundary
    // slope term 2t f'(0)/x and the curvature of T across the stationary
    // point, T''/(4t).
    err = std::abs(amp) * (std::abs(tay[0] * f0) * (0.5 / large_distance_ratio(x, t)) +
                           std::abs(tay[0] * f1) * (2.0 * t / x) + std::abs(2.0 * tay[2] * f0) / (4.0 * t));
    return psi;
  });
  return field;
}

WaveField propagate_b_series(const TransmissionModel& model, const InitialState& f, const Grid& grid, int N,
                             int M) {
  WaveField field(grid, "b-series");
  const int order = max_order(f, N);
  const bool terminates = derivatives_terminate(f);
  std::vector<cplx> d(static_cast<std::size_t>(order) + 1);
  for (int n = 0; n <= order; ++n) d[static_cast<std::size_t>(n)] = derivative_at_zero(f, n);
  fill(field, [&](double x, double t, double& err) {
    const auto sc = kernel::series_b(model, x, t, order, M);
    const cplx pre = std::exp(kI * (x * x / (4.0 * t))) / (2.0 * kPi);
    // The m = M piece of each b_n is the last retained term of the inner
    // stationary-phase sum.
    const cplx inner_weight =
        std::tgamma(M + 0.5) / std::tgamma(2.0 * M + 1.0) * std::pow(special_fn::sqrt_it(t), -(2 * M + 1));
    cplx sum = 0.0, inner_tail = 0.0;
    double tail = 0.0;
    cplx sign = kI;  // (-1)^n i^{n+1}
    for (int n = 0; n <= order; ++n) {
      const auto un = static_cast<std::size_t>(n);
      const cplx term = pre * sc.b[un] * d[un];
      sum += term;
      if (term != 0.0) tail = std::abs(term);
      inner_tail += sign * sc.s[un][static_cast<std::size_t>(M)] * d[un];
      sign *= -kI;
    }
    err = (order > 0 && !terminates ? tail : 0.0) + std::abs(pre * inner_weight * inner_tail) +
          crossed_pole_bound(model, x, t, d) + 1e-12 * std::abs(sum);
    return sum;
  });
  return field;
}

kernel::Options quadrature_defaults() {
  kernel::Options o;
  o.force_quadrature = true;
  return o;
}

WaveField propagate_quadrature(const TransmissionModel& model, const ExponentialSum& f, const Grid& grid,
                               kernel::Options opts) {
  WaveField field(grid, "quadrature");
  for (const auto& term : f.terms()) {
    if (!(term.mu.real() > 0.0)) {
      throw DivergenceError(
          "quadrature: F(q) does not exist for a non-decaying initial state (Re mu = 0); use the series or "
          "closed method");
    }
  }
  fill(field, [&](double x, double t, double& err) {
    cplx sum = 0.0;
    err = 0.0;
    for (const auto& term : f.terms()) {
      const auto k = kernel::phi(model, -kI * term.mu, x, t, opts);
      sum += term.c * k.value;
      err += std::abs(term.c) * k.err_estimate;
    }
    return sum;
  });
  return field;
}

WaveField propagate_auto(const TransmissionModel& model, const InitialState& f, const Grid& grid) {
  using transmission::Kind;
  const auto* e = std::get_if<ExponentialSum>(&f);
  if (e && (model.is_rational())) {
    WaveField out = propagate_closed(model, *e, grid);
    out.method = "auto";
    out.point_methods.assign(out.psi.size(), "closed");
    return out;
  }
  if (model.kind() == Kind::kWkbSmooth) {
    WaveField out = propagate_asymptotic(model, f, grid, false);
    out.method = "auto";
    out.point_methods.assign(out.psi.size(), "asymptotic");
    return out;
  }
  WaveField out(grid, "auto");
  out.point_methods.resize(out.psi.size());
  for (std::size_t it = 0; it < grid.ts.size(); ++it) {
    for (std::size_t ix = 0; ix < grid.xs.size(); ++ix) {
      Grid one{{grid.xs[ix]}, {grid.ts[it]}, grid.barrier_edge};
      const bool near = large_distance_ratio(grid.xs[ix], grid.ts[it]) < 25.0;
      const WaveField w = near ? propagate_series(model, f, one) : propagate_b_series(model, f, one);
      const std::size_t i = out.index(it, ix);
      out.psi[i] = w.psi[0];
      out.err[i] = w.err[0];
      out.point_methods[i] = w.method;
    }
  }
  return out;
}

double rel_l2(const WaveField& a, const WaveField& ref) {
  if (a.psi.size() != ref.psi.size()) throw DomainError("rel_l2: fields live on different grids");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.psi.size(); ++i) {
    num += std::norm(a.psi[i] - ref.psi[i]);
    den += std::norm(ref.psi[i]);
  }
  if (den == 0.0) return num == 0.0 ? 0.0 : INFINITY;
  return std::sqrt(num / den);
}

void write_csv(const WaveField& field, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot open " + tmp + " for writing");
    out << "t,x,re_psi,im_psi,density,err_estimate,method\n";
    char line[512];
    for (std::size_t it = 0; it < field.ts.size(); ++it) {
      for (std::size_t ix = 0; ix < field.xs.size(); ++ix) {
        const std::size_t i = field.index(it, ix);
        const std::string& m = field.point_methods.empty() ? field.method : field.point_methods[i];
        std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%s\n", field.ts[it], field.xs[ix],
                      field.psi[i].real(), field.psi[i].imag(), std::norm(field.psi[i]), field.err[i], m.c_str());
        out << line;
      }
    }
    if (!out) throw std::runtime_error("write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace tunnel::propagator
