#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tunnel/errors.hpp"
#include "tunnel/propagator.hpp"
#include "tunnel/special_fn.hpp"

using tunnel::cplx;
namespace pr = tunnel::propagator;
namespace kn = tunnel::kernel;
namespace tr = tunnel::transmission;
using pr::Grid;
using pr::Method;
using tr::TransmissionModel;
using tunnel::initial_state::BoundaryDerivatives;
using tunnel::initial_state::ExponentialSum;

namespace {

const cplx kI(0.0, 1.0);

double rel(cplx got, cplx want) { return std::abs(got - want) / std::abs(want); }

Grid grid(std::vector<double> xs, std::vector<double> ts) {
  Grid g;
  g.xs = std::move(xs);
  g.ts = std::move(ts);
  return g;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST(Propagator, MethodNamesRoundTrip) {
  for (auto m : {Method::kAuto, Method::kClosed, Method::kSeries, Method::kBSeries, Method::kAsymptotic,
                 Method::kQuadrature, Method::kOracle}) {
    EXPECT_EQ(pr::method_from_string(pr::to_string(m)), m);
  }
  EXPECT_THROW(pr::method_from_string("magic"), tunnel::DomainError);
}

TEST(Propagator, GridValidationNamesTheOffendingPoint) {
  try {
    grid({1.0, 2.0}, {0.5, 0.0}).validate();
    FAIL() << "expected DomainError";
  } catch (const tunnel::DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("t > 0"), std::string::npos) << e.what();
  }
  auto g = grid({0.5, 2.0}, {1.0});
  g.barrier_edge = 1.0;
  EXPECT_THROW(g.validate(), tunnel::DomainError);
  EXPECT_THROW(grid({2.0, 1.0}, {1.0}).validate(), tunnel::DomainError);
  EXPECT_NO_THROW(grid({1.0, 2.0}, {0.1, 1.0}).validate());
}

TEST(Series, ConstantProfileTerminates) {
  const auto m = TransmissionModel::rectangular(1.0, 0.5);
  auto g = grid({3.0, 5.0}, {0.4});
  g.barrier_edge = 1.0;
  const auto field = pr::propagate_series(m, ExponentialSum::constant(2.5), g);
  for (std::size_t ix = 0; ix < 2; ++ix) {
    const cplx want = 2.5 * kn::phi(m, 0.0, g.xs[ix], 0.4).value;
    EXPECT_LE(rel(field.at(0, ix), want), 1e-12);
  }
}

TEST(Series, FreeShutter) {
  const auto field = pr::propagate_series(TransmissionModel::free(), BoundaryDerivatives{{1.0}}, grid({2.0}, {0.5}));
  const double x = 2.0, t = 0.5;
  const cplx want = 0.5 * std::exp(kI * x * x / (4.0 * t)) *
                    tunnel::special_fn::faddeeva(tunnel::special_fn::sqrt_it(t) * x / (2.0 * t));
  EXPECT_LE(rel(field.at(0, 0), want), 1e-13);
}

TEST(Series, AgreesWithClosedDelta) {
  const auto g = grid({8.0}, {0.5});
  const auto f = ExponentialSum::exponential(1.0, 1.0);
  const auto s = pr::propagate_series(TransmissionModel::delta(1.0), f, g, 6);
  const auto c = pr::propagate_closed_delta(1.0, f, g);
  EXPECT_LE(rel(s.at(0, 0), c.at(0, 0)), 1e-4);
}

TEST(Closed, ZeroDeltaIsFree) {
  const ExponentialSum f({{1.0, 0.0}, {cplx(0.5, 0.2), 0.7}});
  const auto g = grid({0.5, 3.0, 9.0}, {0.2, 1.5});
  const auto d = pr::propagate_closed_delta(0.0, f, g);
  const auto free = pr::propagate_closed_free(f, g);
  for (std::size_t i = 0; i < d.psi.size(); ++i) EXPECT_LE(std::abs(d.psi[i] - free.psi[i]), 1e-15);
}

TEST(Closed, DeltaFieldSolvesTheSchrodingerEquation) {
  const double h = 1e-4;
  const auto f = ExponentialSum({{1.0, 1.0}, {0.5, 0.0}});
  for (double lambda : {-1.0, 1.0, 3.0}) {
    for (auto [x, t] : {std::pair{1.5, 0.3}, std::pair{4.0, 1.0}}) {
      auto psi = [&](double xx, double tt) { return pr::propagate_closed_delta(lambda, f, grid({xx}, {tt})).at(0, 0); };
      const cplx dt = (psi(x, t + h) - psi(x, t - h)) / (2.0 * h);
      const cplx dxx = (psi(x + h, t) - 2.0 * psi(x, t) + psi(x - h, t)) / (h * h);
      EXPECT_LE(std::abs(kI * dt + dxx), 1e-5) << "lambda=" << lambda << " x=" << x;
    }
  }
}

TEST(Closed, ReflectionlessIsFreeAtShortTimes) {
  const double a = 1.0, x = 10.0, t = 0.01 * x / a;
  const auto f = ExponentialSum::constant(1.0);
  const auto r = pr::propagate_closed_reflectionless(a, f, grid({x}, {t}));
  const auto free = pr::propagate_closed_free(f, grid({x}, {t}));
  EXPECT_LE(rel(r.at(0, 0), free.at(0, 0)), 0.05);
}

TEST(Closed, ReflectionlessStep) {
  const double a = 0.8, x = 5.0, t = 0.7;
  const auto r = pr::propagate_closed_reflectionless(a, ExponentialSum::constant(1.0), grid({x}, {t}));
  const cplx s = tunnel::special_fn::sqrt_it(t);
  const cplx w0 = tunnel::special_fn::faddeeva(s * x / (2.0 * t));
  const cplx wa = tunnel::special_fn::faddeeva(s * (x / (2.0 * t) - kI * a));
  // The pole at ia sits above the real axis, so its residue leaves the last term.
  const cplx line = 0.5 * std::exp(kI * x * x / (4.0 * t)) * wa - std::exp(-a * x + kI * a * a * t);
  const cplx want = 0.5 * std::exp(kI * x * x / (4.0 * t)) * w0 - 2.0 * (0.5 * std::exp(kI * x * x / (4.0 * t)) * w0 - line);
  EXPECT_LE(rel(r.at(0, 0), want), 1e-13);
}

TEST(Quadrature, MatchesClosedForms) {
  const auto f = ExponentialSum::exponential(1.0, 1.0);
  const auto g = grid({1.0, 4.0, 8.0}, {0.2, 1.0});
  const auto q = pr::propagate_quadrature(TransmissionModel::delta(1.0), f, g);
  const auto c = pr::propagate_closed_delta(1.0, f, g);
  EXPECT_LE(pr::rel_l2(q, c), 1e-8);
  const auto qr = pr::propagate_quadrature(TransmissionModel::reflectionless(1.0), f, g);
  const auto cr = pr::propagate_closed_reflectionless(1.0, f, g);
  EXPECT_LE(pr::rel_l2(qr, cr), 1e-8);
  const auto qf = pr::propagate_quadrature(TransmissionModel::free(), f, g);
  for (std::size_t it = 0; it < 2; ++it) {
    for (std::size_t ix = 0; ix < 3; ++ix) {
      EXPECT_LE(rel(qf.at(it, ix), kn::phi_free(-kI, g.xs[ix], g.ts[it]).value), 1e-12);
    }
  }
  EXPECT_THROW(pr::propagate_quadrature(TransmissionModel::free(), ExponentialSum::constant(1.0), g),
               tunnel::DivergenceError);
}

TEST(Asymptotic, RegimeChecks) {
  const auto m = TransmissionModel::free();
  const auto f = ExponentialSum::constant(1.0);
  EXPECT_THROW(pr::propagate_asymptotic(m, f, grid({4.0}, {1.0})), tunnel::RegimeError);
  const auto loose = pr::propagate_asymptotic(m, f, grid({4.0}, {1.0}), false);
  EXPECT_FALSE(loose.warnings.empty());
  const auto mid = pr::propagate_asymptotic(m, f, grid({12.0}, {1.0}));
  EXPECT_FALSE(mid.warnings.empty());
  const auto far = pr::propagate_asymptotic(m, f, grid({25.0}, {1.0}));
  EXPECT_TRUE(far.warnings.empty());
}

TEST(Asymptotic, FreeLeadingTerm) {
  const double x = 20.0, t = 1.0;  // x^2/4t = 100
  const auto a = pr::propagate_asymptotic(TransmissionModel::free(), ExponentialSum::constant(1.0), grid({x}, {t}));
  const auto c = pr::propagate_closed_free(ExponentialSum::constant(1.0), grid({x}, {t}));
  EXPECT_LE(rel(a.at(0, 0), c.at(0, 0)), 0.01);
  EXPECT_LE(std::abs(a.at(0, 0) - c.at(0, 0)), 2.0 * a.err[0]);
}

TEST(Asymptotic, OpaqueWkbBarrier) {
  const auto m = TransmissionModel::wkb(tr::BarrierProfile::constant(4.0, 1.0));
  const double x = 30.0, t = 15.0;  // x/2t = 1
  auto g = grid({x}, {t});
  g.barrier_edge = 1.0;
  const auto a = pr::propagate_asymptotic(m, ExponentialSum::constant(1.0), g, false);
  const double theta = std::exp(std::sqrt(3.0));
  const cplx want = tunnel::special_fn::sqrt_it(t) / std::sqrt(M_PI) / x * 2.0 *
                    std::exp(kI * x * x / (4.0 * t)) / (2.0 * theta + 0.5 / theta);
  EXPECT_LE(rel(a.at(0, 0), want), 1e-8);
}

TEST(Propagator, DensityDecayLaw) {
  const auto f = ExponentialSum::constant(1.0);
  const double t = 1.0;
  for (double x : {20.0, 40.0}) {
    const auto g = grid({x}, {t});
    const auto d = pr::propagate_closed_delta(1.0, f, g);
    const auto r = pr::propagate_closed_reflectionless(1.0, f, g);
    const double k = x / (2.0 * t);
    const double want_d = std::norm(tr::t_coeff(TransmissionModel::delta(1.0), k)) / M_PI;
    const double want_r = std::norm(tr::t_coeff(TransmissionModel::reflectionless(1.0), k)) / M_PI;
    EXPECT_NEAR(d.density(0, 0) * x * x / t / want_d, 1.0, 0.01) << "x=" << x;
    EXPECT_NEAR(r.density(0, 0) * x * x / t / want_r, 1.0, 0.01) << "x=" << x;
  }
}

TEST(Propagator, CrossMethodAgreementWithinEstimates) {
  const auto f = ExponentialSum::exponential(1.0, 1.0);
  const auto g = grid({2.0, 4.0, 6.0, 8.0, 10.0}, {0.1, 0.3, 0.5, 0.8, 1.2});
  for (const auto& m : {TransmissionModel::delta(1.0), TransmissionModel::reflectionless(1.0)}) {
    const auto c = pr::propagate_closed(m, f, g);
    const auto q = pr::propagate_quadrature(m, f, g);
    const auto s = pr::propagate_series(m, f, g, 8);
    for (std::size_t i = 0; i < c.psi.size(); ++i) {
      EXPECT_LE(std::abs(q.psi[i] - c.psi[i]), q.err[i] + c.err[i]) << tr::to_string(m.kind()) << " i=" << i;
      EXPECT_LE(std::abs(s.psi[i] - c.psi[i]), s.err[i] + c.err[i]) << tr::to_string(m.kind()) << " i=" << i;
    }
    const auto far = grid({30.0, 40.0}, {1.0, 2.0});
    const auto ca = pr::propagate_closed(m, f, far);
    const auto aa = pr::propagate_asymptotic(m, f, far, false);
    const auto bb = pr::propagate_b_series(m, f, far);
    for (std::size_t i = 0; i < ca.psi.size(); ++i) {
      EXPECT_LE(std::abs(aa.psi[i] - ca.psi[i]), aa.err[i] + ca.err[i]) << tr::to_string(m.kind()) << " i=" << i;
      EXPECT_LE(std::abs(bb.psi[i] - ca.psi[i]), bb.err[i] + ca.err[i]) << tr::to_string(m.kind()) << " i=" << i;
    }
  }
}

TEST(Propagator, ShortTimeFreeness) {
  const double x = 10.0, t = 0.1;
  const auto f = ExponentialSum::constant(1.0);
  auto g = grid({x}, {t});
  const cplx free = pr::propagate_closed_free(f, g).at(0, 0);
  g.barrier_edge = 2.0;
  const std::vector<TransmissionModel> models{TransmissionModel::delta(1.0), TransmissionModel::reflectionless(1.0),
                                              TransmissionModel::rectangular(1.0, 1.0)};
  for (const auto& m : models) {
    EXPECT_LE(std::abs(pr::propagate_series(m, f, g).at(0, 0) / free - 1.0), 0.05) << tr::to_string(m.kind());
  }
}

TEST(Propagator, AutoPrefersClosedForms) {
  const auto g = grid({3.0}, {0.5});
  const auto a = pr::propagate_auto(TransmissionModel::delta(1.0), ExponentialSum::constant(1.0), g);
  const auto c = pr::propagate_closed_delta(1.0, ExponentialSum::constant(1.0), g);
  EXPECT_EQ(a.at(0, 0), c.at(0, 0));
}

TEST(Propagator, CsvIsDeterministic) {
  const auto dir = std::filesystem::temp_directory_path() / "tunnel_csv_test";
  std::filesystem::create_directories(dir);
  const auto f = ExponentialSum::exponential(1.0, 1.0);
  const auto g = grid({2.0, 3.0, 4.0}, {0.2, 0.4});
  const auto m = TransmissionModel::rectangular(1.0, 0.5);
  auto gg = g;
  gg.barrier_edge = 1.0;
  pr::write_csv(pr::propagate_series(m, f, gg), (dir / "a.csv").string());
  pr::write_csv(pr::propagate_series(m, f, gg), (dir / "b.csv").string());
  const auto a = slurp((dir / "a.csv").string());
  EXPECT_EQ(a, slurp((dir / "b.csv").string()));
  EXPECT_EQ(a.substr(0, a.find('\n')), "t,x,re_psi,im_psi,density,err_estimate,method");
  EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 7);
  std::filesystem::remove_all(dir);
}

TEST(Propagator, RelL2) {
  const auto g = grid({1.0, 2.0}, {0.5});
  const auto a = pr::propagate_closed_free(ExponentialSum::constant(1.0), g);
  EXPECT_EQ(pr::rel_l2(a, a), 0.0);
  auto b = a;
  b.psi[0] *= 1.1;
  EXPECT_GT(pr::rel_l2(b, a), 0.0);
  EXPECT_THROW(pr::rel_l2(a, pr::propagate_closed_free(ExponentialSum::constant(1.0), grid({1.0}, {0.5}))),
               tunnel::DomainError);
}
