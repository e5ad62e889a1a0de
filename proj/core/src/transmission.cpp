#include "tunnel/transmission.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "tunnel/errors.hpp"
#include "tunnel/quadrature.hpp"

namespace tunnel::transmission {
namespace {

constexpr cplx kI{0.0, 1.0};
constexpr double kPi = 3.14159265358979323846;

cplx lift(const cplx&, cplx c) { return c; }
Jet lift(const Jet& like, cplx c) { return Jet(like.order(), c); }
cplx value_at(const cplx& v) { return v; }
cplx value_at(const Jet& v) { return v[0]; }

// cosh(2L sqrt(u)) and sinh(2L sqrt(u))/sqrt(u) are entire in u; near u = 0
// their power series avoid the branch point of sqrt.
template <class S>
void entire_cosh_sinh(const S& u, double width, S& c, S& s) {
  c = lift(u, 0.0);
  s = lift(u, 0.0);
  S upow = lift(u, 1.0);
  double fact_even = 1.0;  // (2j)!
  double wpow = 1.0;       // width^(2j)
  for (int j = 0; j < 40; ++j) {
    const double fact_odd = fact_even * (2 * j + 1);
    c += upow * cplx(wpow / fact_even);
    s += upow * cplx(wpow * width / fact_odd);
    upow = upow * u;
    wpow *= width * width;
    fact_even = fact_odd * (2 * j + 2);
  }
}

template <class S>
S rectangular_t(const S& k, double v0, double half_width) {
  using std::exp;
  using std::sqrt;
  const double width = 2.0 * half_width;
  const S u = lift(k, v0) - k * k;
  const S phase = exp(k * cplx(0.0, -width));
  const S coupling = lift(k, v0) - k * k * cplx(2.0);  // kappa^2 - k^2
  if (std::abs(value_at(u)) * width * width < 1.0) {
    S c, s;
    entire_cosh_sinh(u, width, c, s);
    return phase * (k * cplx(2.0)) / (k * cplx(2.0) * c + coupling * s * kI);
  }
  // Scaled by 2 exp(-width*kappa); principal sqrt keeps Re kappa >= 0. The
  // result is even in kappa, so the branch choice does not change T.
  const S kappa = sqrt(u);
  const S e = exp(kappa * cplx(-width));
  const S e2 = e * e;
  const S one = lift(k, 1.0);
  return phase * (k * cplx(4.0)) * e /
         (k * cplx(2.0) * (one + e2) + coupling * (one - e2) / kappa * kI);
}

// Fornberg finite-difference weights for derivative `m` at 0 on nodes x.
std::vector<double> fd_weights(const std::vector<double>& x, int m) {
  const int n = static_cast<int>(x.size());
  std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
  double c1 = 1.0;
  double c4 = x[0];
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i];
    for (int j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = c[i][m];
  return w;
}

// Segments of [0, L] where V(eta) > k^2.
std::vector<std::pair<double, double>> forbidden_segments(const BarrierProfile& p, double k2) {
  const int samples = 4096;
  const double h = p.length / samples;
  auto g = [&](double eta) { return p.v(eta) - k2; };
  auto refine = [&](double a, double b) {
    double ga = g(a);
    for (int it = 0; it < 80; ++it) {
      const double m = 0.5 * (a + b);
      const double gm = g(m);
      if ((gm > 0.0) == (ga > 0.0)) {
        a = m;
        ga = gm;
      } else {
        b = m;
      }
    }
    return 0.5 * (a + b);
  };
  std::vector<std::pair<double, double>> out;
  bool inside = g(0.0) > 0.0;
  double start = 0.0;
  double prev = 0.0;
  for (int i = 1; i <= samples; ++i) {
    const double eta = (i == samples) ? p.length : i * h;
    const bool now = g(eta) > 0.0;
    if (now != inside) {
      const double root = refine(prev, eta);
      if (inside) {
        out.emplace_back(start, root);
      } else {
        start = root;
      }
      inside = now;
    }
    prev = eta;
  }
  if (inside) out.emplace_back(start, p.length);
  return out;
}

}  // namespace

BarrierProfile BarrierProfile::constant(double v0, double length) {
  if (!(length > 0.0) || !(v0 > 0.0)) throw DomainError("constant profile: V0 > 0 and L > 0 required");
  return {[v0](double) { return v0; }, length, v0, "constant"};
}

BarrierProfile BarrierProfile::gaussian(double v0, double length, double sigma) {
  if (!(length > 0.0) || !(v0 > 0.0) || !(sigma > 0.0)) {
    throw DomainError("gaussian profile: V0, L, sigma > 0 required");
  }
  const double centre = 0.5 * length;
  return {[=](double eta) {
            const double s = (eta - centre) / sigma;
            return v0 * std::exp(-s * s);
          },
          length, v0, "gaussian"};
}

BarrierProfile BarrierProfile::sampled(std::vector<double> values, double length) {
  if (values.size() < 2 || !(length > 0.0)) throw DomainError("sampled profile: >= 2 samples and L > 0");
  double vmax = 0.0;
  for (double v : values) {
    if (v < 0.0) throw DomainError("sampled profile: V(eta) >= 0 required");
    vmax = std::max(vmax, v);
  }
  if (!(vmax > 0.0)) throw DomainError("sampled profile: max V > 0 required");
  const double h = length / static_cast<double>(values.size() - 1);
  auto fn = [vals = std::move(values), h](double eta) {
    const double s = std::clamp(eta / h, 0.0, static_cast<double>(vals.size() - 1));
    const auto i = std::min(static_cast<std::size_t>(s), vals.size() - 2);
    const double f = s - static_cast<double>(i);
    return (1.0 - f) * vals[i] + f * vals[i + 1];
  };
  return {fn, length, vmax, "sampled"};
}

TransmissionTable::TransmissionTable(std::vector<double> k, std::vector<cplx> t)
    : k_(std::move(k)), t_(std::move(t)) {
  if (k_.size() != t_.size() || k_.size() < 2) throw DomainError("table: need >= 2 rows");
  for (std::size_t i = 1; i < k_.size(); ++i) {
    if (!(k_[i] > k_[i - 1])) throw DomainError("table: k must be strictly increasing");
  }
  // Fritsch-Butland (PCHIP) slopes per component.
  const std::size_t n = k_.size();
  slope_.assign(n, 0.0);
  auto component = [&](auto get) {
    std::vector<double> d(n, 0.0);
    std::vector<double> delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) delta[i] = (get(t_[i + 1]) - get(t_[i])) / (k_[i + 1] - k_[i]);
    d[0] = delta[0];
    d[n - 1] = delta[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (delta[i - 1] * delta[i] <= 0.0) continue;
      const double h0 = k_[i] - k_[i - 1];
      const double h1 = k_[i + 1] - k_[i];
      const double w1 = 2.0 * h1 + h0;
      const double w2 = h1 + 2.0 * h0;
      d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
    return d;
  };
  const auto dre = component([](cplx v) { return v.real(); });
  const auto dim = component([](cplx v) { return v.imag(); });
  for (std::size_t i = 0; i < n; ++i) slope_[i] = {dre[i], dim[i]};
}

std::size_t TransmissionTable::segment(double k) const {
  auto it = std::upper_bound(k_.begin(), k_.end(), k);
  std::size_t i = static_cast<std::size_t>(it - k_.begin());
  if (i == 0) return 0;
  return std::min(i - 1, k_.size() - 2);
}

std::vector<cplx> TransmissionTable::taylor(double k, int order) const {
  std::vector<cplx> out(static_cast<std::size_t>(order) + 1, 0.0);
  if (k < k_.front() || k > k_.back()) {
    out[0] = 1.0;
    return out;
  }
  const std::size_t i = segment(k);
  const double h = k_[i + 1] - k_[i];
  const cplx delta = (t_[i + 1] - t_[i]) / h;
  const cplx c0 = t_[i];
  const cplx c1 = slope_[i];
  const cplx c2 = (3.0 * delta - 2.0 * slope_[i] - slope_[i + 1]) / h;
  const cplx c3 = (slope_[i] + slope_[i + 1] - 2.0 * delta) / (h * h);
  const double s = k - k_[i];
  const cplx p[4] = {c0 + s * (c1 + s * (c2 + s * c3)), c1 + s * (2.0 * c2 + 3.0 * s * c3),
                     c2 + 3.0 * s * c3, c3};
  for (int j = 0; j <= std::min(order, 3); ++j) out[static_cast<std::size_t>(j)] = p[j];
  return out;
}

cplx TransmissionTable::operator()(double k) const { return taylor(k, 0)[0]; }

TransmissionTable read_table(std::istream& in) {
  std::vector<double> ks;
  std::vector<cplx> ts;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    std::istringstream row(line);
    std::vector<double> cols;
    double v;
    while (row >> v) cols.push_back(v);
    if (!row.eof()) throw DomainError("table line " + std::to_string(lineno) + ": not a number");
    if (cols.empty()) continue;
    if (cols.size() < 2 || cols.size() > 3) {
      throw DomainError("table line " + std::to_string(lineno) + ": expected 2 or 3 columns");
    }
    ks.push_back(cols[0]);
    ts.emplace_back(cols[1], cols.size() == 3 ? cols[2] : 0.0);
  }
  return TransmissionTable(std::move(ks), std::move(ts));
}

TransmissionTable read_table_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open transmission table '" + path + "'");
  return read_table(in);
}

std::string to_string(Kind kind) {
  switch (kind) {
    case Kind::kFree: return "free";
    case Kind::kDelta: return "delta";
    case Kind::kRectangular: return "rectangular";
    case Kind::kWkbSmooth: return "wkb-smooth";
    case Kind::kReflectionless: return "reflectionless";
    case Kind::kTabulated: return "tabulated";
  }
  return "unknown";
}

TransmissionModel TransmissionModel::free() { return TransmissionModel(Free{}); }

TransmissionModel TransmissionModel::delta(double lambda) {
  if (!std::isfinite(lambda)) throw DomainError("delta: lambda must be finite");
  return TransmissionModel(Delta{lambda});
}

TransmissionModel TransmissionModel::rectangular(double v0, double half_width) {
  if (!(v0 > 0.0) || !(half_width > 0.0)) throw DomainError("rectangular: V0 > 0 and L > 0 required");
  return TransmissionModel(Rectangular{v0, half_width});
}

TransmissionModel TransmissionModel::reflectionless(double a) {
  if (!(a > 0.0)) throw DomainError("reflectionless: a > 0 required");
  return TransmissionModel(Reflectionless{a});
}

TransmissionModel TransmissionModel::wkb(BarrierProfile profile) {
  if (!profile.v || !(profile.length > 0.0) || !(profile.v_max > 0.0)) {
    throw DomainError("wkb-smooth: profile with L > 0 and max V > 0 required");
  }
  return TransmissionModel(WkbSmooth{std::move(profile)});
}

TransmissionModel TransmissionModel::tabulated(TransmissionTable table) {
  return TransmissionModel(Tabulated{std::make_shared<const TransmissionTable>(std::move(table))});
}

Kind TransmissionModel::kind() const { return static_cast<Kind>(params_.index()); }

bool TransmissionModel::is_rational() const {
  const Kind k = kind();
  return k == Kind::kFree || k == Kind::kDelta || k == Kind::kReflectionless;
}

bool TransmissionModel::is_analytic() const {
  return is_rational() || kind() == Kind::kRectangular;
}

double TransmissionModel::k_char() const {
  switch (kind()) {
    case Kind::kDelta: {
      const double l = std::abs(std::get<Delta>(params_).lambda);
      return l > 0.0 ? l : 1.0;
    }
    case Kind::kRectangular: return std::sqrt(std::get<Rectangular>(params_).v0);
    case Kind::kReflectionless: return std::get<Reflectionless>(params_).a;
    case Kind::kWkbSmooth: return std::sqrt(std::get<WkbSmooth>(params_).profile.v_max);
    default: return 1.0;
  }
}

cplx t_coeff(const TransmissionModel& model, cplx k) {
  return std::visit(
      [&](const auto& p) -> cplx {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, Free>) {
          return 1.0;
        } else if constexpr (std::is_same_v<P, Delta>) {
          if (p.lambda == 0.0) return 1.0;
          const cplx pole = -kI * (0.5 * p.lambda);
          if (k == pole) throw PoleError("delta: k at the pole -i lambda/2");
          return k / (k - pole);
        } else if constexpr (std::is_same_v<P, Rectangular>) {
          return rectangular_t(k, p.v0, p.half_width);
        } else if constexpr (std::is_same_v<P, Reflectionless>) {
          const cplx pole = kI * p.a;
          if (k == pole) throw PoleError("reflectionless: k at the pole i a");
          return (k + kI * p.a) / (k - pole);
        } else if constexpr (std::is_same_v<P, WkbSmooth>) {
          if (k.imag() != 0.0) throw DomainError("wkb-smooth: T defined for real k only");
          const double theta = wkb_theta(model, k.real());
          return 2.0 / (2.0 * theta + 0.5 / theta);
        } else {
          if (k.imag() != 0.0) throw DomainError("tabulated: T defined for real k only");
          return (*p.table)(k.real());
        }
      },
      model.params());
}

Jet t_jet(const TransmissionModel& model, cplx k0, int order) {
  const Jet k = Jet::variable(order, k0);
  switch (model.kind()) {
    case Kind::kFree: return Jet(order, 1.0);
    case Kind::kDelta: {
      const double lambda = std::get<Delta>(model.params()).lambda;
      if (lambda == 0.0) return Jet(order, 1.0);
      const cplx pole = -kI * (0.5 * lambda);
      if (k0 == pole) throw PoleError("delta: jet at the pole");
      return k / (k - pole);
    }
    case Kind::kReflectionless: {
      const double a = std::get<Reflectionless>(model.params()).a;
      if (k0 == kI * a) throw PoleError("reflectionless: jet at the pole");
      return (k + kI * a) / (k - kI * a);
    }
    case Kind::kRectangular: {
      const auto& p = std::get<Rectangular>(model.params());
      return rectangular_t(k, p.v0, p.half_width);
    }
    default: {
      if (k0.imag() != 0.0) throw DomainError("t_jet: sampled models need real k");
      Jet j(order, 0.0);
      const auto tay = t_taylor(model, k0.real(), order);
      for (int i = 0; i <= order; ++i) j[static_cast<std::size_t>(i)] = tay[static_cast<std::size_t>(i)];
      return j;
    }
  }
}

std::vector<cplx> t_taylor(const TransmissionModel& model, double k0, int order) {
  if (model.is_analytic()) return t_jet(model, k0, order).coeffs();
  if (model.kind() == Kind::kTabulated) {
    return std::get<Tabulated>(model.params()).table->taylor(k0, order);
  }
  // WKB: central differences on 2p+1 nodes, step h and h/2, Richardson on O(h^2).
  std::vector<cplx> out(static_cast<std::size_t>(order) + 1, 0.0);
  out[0] = t_coeff(model, k0);
  const double h = 0.02 * model.k_char();
  double fact = 1.0;
  for (int m = 1; m <= order; ++m) {
    fact *= m;
    const int p = m / 2 + 2;
    auto estimate = [&](double step) {
      std::vector<double> nodes;
      for (int i = -p; i <= p; ++i) nodes.push_back(i * step);
      const auto w = fd_weights(nodes, m);
      cplx s = 0.0;
      for (int i = -p; i <= p; ++i) s += w[static_cast<std::size_t>(i + p)] * t_coeff(model, k0 + i * step);
      return s;
    };
    const cplx coarse = estimate(h);
    const cplx fine = estimate(0.5 * h);
    const int accuracy = 2 * p + 1 - m + ((m % 2 == 0) ? 1 : 0);
    const double r = std::pow(2.0, accuracy);
    out[static_cast<std::size_t>(m)] = (r * fine - coarse) / (r - 1.0) / fact;
  }
  return out;
}

double wkb_theta(const TransmissionModel& model, double k) {
  if (model.kind() != Kind::kWkbSmooth) throw UnsupportedError("wkb_theta: model is not wkb-smooth");
  const auto& prof = std::get<WkbSmooth>(model.params()).profile;
  const double k2 = k * k;
  if (!(k2 < prof.v_max)) throw BranchError("wkb_theta: no turning points, k^2 >= max V");
  double action = 0.0;
  for (const auto& [a, b] : forbidden_segments(prof, k2)) {
    // eta = a + (b - a)(1 - cos s)/2 removes the sqrt behaviour at turning points.
    const double half = 0.5 * (b - a);
    auto integrand = [&](double s) {
      const double eta = a + half * (1.0 - std::cos(s));
      const double g = prof.v(eta) - k2;
      return g > 0.0 ? std::sqrt(g) * half * std::sin(s) : 0.0;
    };
    action += quadrature::integrate<double>(integrand, 0.0, kPi, 1e-14, 1e-11).value;
  }
  return std::exp(action);
}

std::vector<cplx> t_poles(const TransmissionModel& model) {
  switch (model.kind()) {
    case Kind::kFree: return {};
    case Kind::kDelta: {
      const double lambda = std::get<Delta>(model.params()).lambda;
      if (lambda == 0.0) return {};
      return {-kI * (0.5 * lambda)};
    }
    case Kind::kReflectionless: return {kI * std::get<Reflectionless>(model.params()).a};
    default:
      throw UnsupportedError("t_poles: only free, delta and reflectionless models have tabulated poles");
  }
}

}  // namespace tunnel::transmission
