#include <benchmark/benchmark.h>

#include "tunnel/kernel.hpp"
#include "tunnel/oracle_tdse.hpp"
#include "tunnel/propagator.hpp"
#include "tunnel/special_fn.hpp"

namespace {

using tunnel::cplx;
namespace kn = tunnel::kernel;
namespace pr = tunnel::propagator;
using tunnel::initial_state::ExponentialSum;
using tunnel::transmission::TransmissionModel;

void BM_Faddeeva(benchmark::State& state) {
  // Sweep a ray from the upper half plane into the lower one.
  const double y = static_cast<double>(state.range(0)) / 10.0;
  double x = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tunnel::special_fn::faddeeva(cplx(x, y)));
    x = x < 20.0 ? x + 0.37 : -20.0;
  }
}
BENCHMARK(BM_Faddeeva)->Arg(10)->Arg(1)->Arg(-10)->Arg(-40);

void BM_PhiClosed(benchmark::State& state) {
  const auto model = TransmissionModel::delta(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(kn::phi(model, cplx(0.3, -0.2), 6.0, 0.5));
}
BENCHMARK(BM_PhiClosed);

void BM_PhiQuadrature(benchmark::State& state) {
  const auto model = TransmissionModel::delta(1.0);
  kn::Options opts;
  opts.force_quadrature = true;
  opts.rel_tol = state.range(0) == 0 ? 1e-6 : 1e-11;
  for (auto _ : state) benchmark::DoNotOptimize(kn::phi(model, cplx(0.3, -0.2), 6.0, 0.5, opts));
}
BENCHMARK(BM_PhiQuadrature)->Arg(0)->Arg(1);

void BM_SeriesRectangular(benchmark::State& state) {
  const auto model = TransmissionModel::rectangular(1.0, 0.5);
  const int order = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(kn::series_a(model, 8.0, 0.4, order));
}
BENCHMARK(BM_SeriesRectangular)->Arg(0)->Arg(4)->Arg(8);

void BM_CrankNicolson(benchmark::State& state) {
  tunnel::oracle_tdse::OracleConfig c;
  c.x_min = -10.0;
  c.x_max = 10.0;
  c.dx = 20.0 / static_cast<double>(state.range(0));
  c.dt = 1e-3;
  c.epsilon = 0.1;
  c.absorber_width = 3.0;
  pr::Grid g;
  g.xs = {2.0};
  g.ts = {0.1};
  for (auto _ : state) benchmark::DoNotOptimize(tunnel::oracle_tdse::evolve(c, ExponentialSum::constant(1.0), g));
  // 100 steps per evolve.
  state.SetItemsProcessed(state.iterations() * 100 * state.range(0));
}
BENCHMARK(BM_CrankNicolson)->Arg(2000)->Arg(8000)->Arg(32000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
