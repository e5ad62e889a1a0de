// Acceptance suite: one PASS/FAIL line per criterion.
//
//   tunnel_acceptance            run C1..C10
//   tunnel_acceptance C2 C7      run a subset
//
// Exit status is 0 when every selected criterion passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "runner.hpp"
#include "scenario.hpp"
#include "tunnel/kernel.hpp"
#include "tunnel/oracle_tdse.hpp"
#include "tunnel/propagator.hpp"
#include "tunnel/special_fn.hpp"
#include "tunnel/transmission.hpp"

using namespace tunnel;
using cli::ScenarioConfig;
using initial_state::ExponentialSum;
using propagator::Grid;
using propagator::Method;
using propagator::WaveField;
using transmission::TransmissionModel;
namespace sf = special_fn;
namespace tr = transmission;
namespace pr = propagator;

namespace {

const cplx kI(0.0, 1.0);

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? "" : " [x]");
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

Grid make_grid(std::vector<double> xs, std::vector<double> ts, double edge = 0.0) {
  Grid g;
  g.xs = std::move(xs);
  g.ts = std::move(ts);
  g.barrier_edge = edge;
  return g;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(a + (b - a) * i / (n - 1));
  return out;
}

// The rows of a field at one sample time, as a field of its own.
WaveField row(const WaveField& f, std::size_t it) {
  WaveField out;
  out.xs = f.xs;
  out.ts = {f.ts[it]};
  out.method = f.method;
  for (std::size_t ix = 0; ix < f.xs.size(); ++ix) {
    out.psi.push_back(f.at(it, ix));
    out.err.push_back(f.err[f.index(it, ix)]);
  }
  return out;
}

double max_rel(const WaveField& a, const WaveField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.psi.size(); ++i) m = std::max(m, std::abs(a.psi[i] - b.psi[i]) / std::abs(b.psi[i]));
  return m;
}

// Free shutter: series at N = 0 against the closed expression, and the oracle.
void c1(Outcome& o) {
  const ScenarioConfig sc = cli::load_scenario("free_shutter");
  const double t = sc.grid.ts[0];
  double worst = 0.0;
  const WaveField series = pr::propagate_series(TransmissionModel::free(), sc.initial, sc.grid, 0);
  for (std::size_t ix = 0; ix < sc.grid.xs.size(); ++ix) {
    const double x = sc.grid.xs[ix];
    const cplx want = 0.5 * std::exp(kI * x * x / (4.0 * t)) * sf::faddeeva(sf::sqrt_it(t) * x / (2.0 * t));
    worst = std::max(worst, std::abs(series.at(0, ix) - want) / std::abs(want));
  }
  o.require(worst <= 1e-14, "series N=0 vs closed max rel " + fmt(worst) + " <= 1e-14");
  const double e = pr::rel_l2(cli::compute_field(sc, Method::kOracle), cli::compute_field(sc, Method::kClosed));
  o.require(e <= 1e-3, "oracle rel-L2 " + fmt(e) + " <= 1e-3");
}

// Delta closed form against the width-refined oracle, and the short-time
// expansion with its next term as the bound.
void c2(Outcome& o) {
  const ScenarioConfig sc = cli::load_scenario("delta_step");
  const WaveField closed = cli::compute_field(sc, Method::kClosed);
  const WaveField oracle = cli::compute_field(sc, Method::kOracle);
  for (std::size_t it = 0; it < sc.grid.ts.size(); ++it) {
    const double e = pr::rel_l2(row(oracle, it), row(closed, it));
    o.require(e <= 1e-3, "t=" + fmt(sc.grid.ts[it]) + " rel-L2 " + fmt(e));
  }
  const double lambda = 1.0;
  double worst = 0.0, worst_x = 0.0, worst_r = 0.0;
  for (double x : {5.0, 10.0, 20.0, 40.0}) {
    for (double ratio : {1e-2, 3e-3, 1e-3}) {
      const double t = ratio * x * x;
      const WaveField c = pr::propagate_closed_delta(lambda, ExponentialSum::constant(1.0), make_grid({x}, {t}));
      const cplx lead = sf::sqrt_it(t) / std::sqrt(M_PI) * std::exp(kI * x * x / (4.0 * t)) / x;
      const cplx approx = lead * (1.0 - kI * lambda * t / x);
      const double next = std::abs(lead) * std::abs(-lambda * lambda * t * t / (x * x) - 2.0 * kI * t / (x * x));
      const double q = std::abs(c.at(0, 0) - approx) / next;
      if (q > worst) {
        worst = q;
        worst_x = x;
        worst_r = ratio;
      }
    }
  }
  o.require(worst <= 1.0, "short-time error / next term max " + fmt(worst) + " (x=" + fmt(worst_x) +
                              ", t/x^2=" + fmt(worst_r) + ") <= 1");
}

// Residual decay exponent against the uniform shutter f(0) phi_free.
double residual_exponent(double lambda) {
  ScenarioConfig sc = cli::load_scenario("delta_cancellation");
  sc.model = TransmissionModel::delta(lambda);
  const WaveField closed = cli::compute_field(sc, Method::kClosed);
  const WaveField shutter = pr::propagate_closed_free(ExponentialSum::constant(1.0), sc.grid);
  return cli::fit_residual_decay(closed, shutter, 0, 10.0, 100.0).exponent;
}

void c3(Outcome& o) {
  const double cancel = residual_exponent(-2.0);
  o.require(cancel >= -2.3 && cancel <= -1.7, "lambda=-2f'(0)/f(0) exponent " + fmt(cancel) + " in [-2.3,-1.7]");
  const double generic = residual_exponent(1.0);
  o.require(generic >= -1.3 && generic <= -0.7, "lambda=1 exponent " + fmt(generic) + " in [-1.3,-0.7]");
}

void c4(Outcome& o) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> k(-50.0, 50.0);
  const auto model = TransmissionModel::reflectionless(1.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) worst = std::max(worst, std::abs(std::abs(tr::t_coeff(model, k(rng))) - 1.0));
  o.require(worst <= 1e-14, "||T|-1| max " + fmt(worst) + " <= 1e-14");

  const ScenarioConfig sc = cli::load_scenario("reflectionless_step");
  const double e = pr::rel_l2(cli::compute_field(sc, Method::kOracle), cli::compute_field(sc, Method::kClosed));
  o.require(e <= 2e-3, "oracle rel-L2 " + fmt(e) + " <= 2e-3");

  double dev = 0.0;
  for (double x : {10.0, 20.0, 40.0}) {
    const auto g = make_grid({x}, {0.01 * x});
    const auto f = ExponentialSum::constant(1.0);
    const cplx r = pr::propagate_closed_reflectionless(1.0, f, g).at(0, 0);
    dev = std::max(dev, std::abs(r / pr::propagate_closed_free(f, g).at(0, 0) - 1.0));
  }
  o.require(dev <= 0.05, "short-time |psi/psi_free-1| " + fmt(dev) + " <= 0.05");
}

// rho x^2/t against |T(x/2t) f(0)|^2/pi at x^2/4t >= 100, over four decades
// of t so that every model scale is crossed.
void c5(Outcome& o) {
  const auto f = ExponentialSum::constant(1.0);
  struct Case {
    std::string name;
    TransmissionModel model;
    double edge;
  };
  const std::vector<Case> cases{{"delta", TransmissionModel::delta(1.0), 0.0},
                                {"rectangular", TransmissionModel::rectangular(1.0, 0.5), 1.0},
                                {"reflectionless", TransmissionModel::reflectionless(1.0), 0.0}};
  for (const auto& c : cases) {
    double worst = 0.0, worst_t = 0.0, worst_r = 0.0;
    for (double t : {1.0, 10.0, 100.0, 1000.0}) {
      std::vector<double> xs;
      for (double r : {100.0, 150.0, 200.0, 400.0}) xs.push_back(std::sqrt(4.0 * t * r));
      const Grid g = make_grid(xs, {t}, c.edge);
      const WaveField psi = c.model.kind() == tr::Kind::kRectangular ? pr::propagate_series(c.model, f, g, 0)
                                                                       : pr::propagate_closed(c.model, f, g);
      for (std::size_t ix = 0; ix < xs.size(); ++ix) {
        const double x = xs[ix];
        const double law = std::norm(tr::t_coeff(c.model, x / (2.0 * t))) / M_PI;
        const double dev = std::abs(psi.density(0, ix) * x * x / t / law - 1.0);
        if (dev > worst) {
          worst = dev;
          worst_t = t;
          worst_r = x * x / (4.0 * t);
        }
      }
    }
    o.require(worst <= 0.01, c.name + " max dev " + fmt(worst) + " (t=" + fmt(worst_t) + ", x^2/4t=" +
                                 fmt(worst_r) + ")");
  }
}

void c6(Outcome& o) {
  const ScenarioConfig sc = cli::load_scenario("rectangular_resonance");
  const WaveField psi = cli::compute_field(sc, Method::kBSeries);
  const WaveField free = pr::propagate_closed_free(std::get<ExponentialSum>(sc.initial), sc.grid);
  const double half = std::get<tr::Rectangular>(sc.model.params()).half_width;
  const double v0 = std::get<tr::Rectangular>(sc.model.params()).v0;
  const double t = sc.grid.ts[0];
  const double regime = v0 * t * t / (sc.grid.xs.front() * sc.grid.xs.front());
  o.require(regime <= 0.1, "V0 t^2/x^2 " + fmt(regime) + " <= 0.1");
  for (const auto& r : cli::resonance_table(psi, free, 0, half, {1, 2, 3})) {
    const bool ok = r.located && std::abs(r.deviation_cells) <= 1.0;
    o.require(ok, "m=" + std::to_string(r.order) + " " + (r.maximum ? "max" : "min") + " off by " +
                      fmt(r.deviation_cells) + " cells");
  }
}

// WKB amplitude 2/(2 theta + 1/(2 theta)) against the exact slab amplitude
// wherever 2 theta >= 10.
void c7(Outcome& o) {
  double worst = 0.0, at_k = 0.0, at_width = 0.0;
  std::size_t points = 0;
  for (double v0 : {4.0, 9.0}) {
    for (double width : {1.0, 2.0, 3.0}) {
      const auto wkb = TransmissionModel::wkb(tr::BarrierProfile::constant(v0, width));
      const auto exact = TransmissionModel::rectangular(v0, 0.5 * width);
      for (int i = 1; i < 400; ++i) {
        const double k = std::sqrt(v0) * i / 400.0;
        if (2.0 * tr::wkb_theta(wkb, k) < 10.0) continue;
        ++points;
        const double dev = std::abs(std::abs(tr::t_coeff(wkb, k)) / std::abs(tr::t_coeff(exact, k)) - 1.0);
        if (dev > worst) {
          worst = dev;
          at_k = k;
          at_width = width;
        }
      }
    }
  }
  o.require(worst <= 0.15, "max ||T_wkb|/|T_exact|-1| " + fmt(worst) + " over " + std::to_string(points) +
                               " opaque points (worst k=" + fmt(at_k) + ", width " + fmt(at_width) + ") <= 0.15");
}

void c8(Outcome& o) {
  const auto f = ExponentialSum::exponential(1.0, 1.0);
  const Grid g = make_grid(linspace(4.0, 8.0, 5), linspace(0.1, 0.3, 5));
  for (const auto& m : {TransmissionModel::delta(1.0), TransmissionModel::reflectionless(3.0)}) {
    const WaveField closed = pr::propagate_closed(m, f, g);
    const WaveField quad = pr::propagate_quadrature(m, f, g);
    const WaveField series = pr::propagate_series(m, f, g, 8);
    const double a = max_rel(quad, closed), b = max_rel(series, closed), c = max_rel(series, quad);
    const double worst = std::max({a, b, c});
    o.require(worst <= 1e-6, tr::to_string(m.kind()) + " max pairwise rel " + fmt(worst) + " <= 1e-6");
  }
}

void c9(Outcome& o) {
  const ScenarioConfig sc = cli::load_scenario("smoothing_sweep");
  const WaveField sharp = cli::compute_field(sc, Method::kClosed);
  for (const auto& rep : oracle_tdse::smoothing_validity_sweep(*sc.oracle, std::get<ExponentialSum>(sc.initial),
                                                                sc.grid, sharp, {0.01, 0.02})) {
    double near = 0.0, far = INFINITY;
    for (std::size_t i = 0; i < rep.xs.size(); ++i) {
      if (rep.xs[i] <= 0.2 * rep.boundary) near = std::max(near, rep.deviation[i]);
      if (rep.xs[i] >= 5.0 * rep.boundary) far = std::min(far, rep.deviation[i]);
    }
    o.require(near <= 0.02 && far >= 10.0 * near,
              "eps=" + fmt(rep.epsilon) + " near " + fmt(near) + " <= 0.02, far " + fmt(far) + " >= 10x");
  }
}

void c10(Outcome& o) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> radius(0.0, 5.0), angle(0.0, 2.0 * M_PI);
  double refl = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const cplx z = std::polar(radius(rng), angle(rng));
    refl = std::max(refl, std::abs(sf::faddeeva(-z) + sf::faddeeva(z) - 2.0 * std::exp(-z * z)));
  }
  o.require(refl <= 1e-10, "reflection " + fmt(refl) + " <= 1e-10");

  std::uniform_real_distribution<double> re(-30.0, 30.0), im(0.0, 30.0), small(0.0, 1.0);
  double bound = 0.0;
  for (int i = 0; i < 2000; ++i) {
    const cplx z(re(rng), i % 2 ? im(rng) : small(rng));
    bound = std::max(bound, std::abs(sf::faddeeva(z)));
  }
  o.require(bound <= 1.0, "max |w| in upper half plane " + fmt(bound) + " <= 1");

  std::uniform_real_distribution<double> dre(-6.0, 6.0), dim(0.0, 6.0);
  const double h = 1e-5;
  double deriv = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const cplx z(dre(rng), dim(rng));
    const cplx ode = -2.0 * z * sf::faddeeva(z) + 2.0 * kI / std::sqrt(M_PI);
    const cplx fd = (sf::faddeeva(z + h) - sf::faddeeva(z - h)) / (2.0 * h);
    deriv = std::max(deriv, std::abs(ode - fd));
  }
  o.require(deriv <= 1e-6, "w' ODE vs central difference " + fmt(deriv) + " <= 1e-6");
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<std::string, std::function<void(Outcome&)>> criteria{
      {"C1", c1}, {"C2", c2}, {"C3", c3}, {"C4", c4}, {"C5", c5},
      {"C6", c6}, {"C7", c7}, {"C8", c8}, {"C9", c9}, {"C10", c10}};
  std::vector<std::string> selected;
  for (int i = 1; i < argc; ++i) selected.emplace_back(argv[i]);
  if (selected.empty()) {
    for (int i = 1; i <= 10; ++i) selected.push_back("C" + std::to_string(i));
  }

  bool all = true;
  for (const auto& name : selected) {
    const auto it = criteria.find(name);
    if (it == criteria.end()) {
      std::fprintf(stderr, "unknown criterion %s\n", name.c_str());
      return 2;
    }
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      it->second(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%-4s %s  %s  (%.1f s)\n", name.c_str(), o.pass ? "PASS" : "FAIL", o.detail.str().c_str(), secs);
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
