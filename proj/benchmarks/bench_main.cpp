#include <benchmark/benchmark.h>

#include "ewmaopt/design_optimizer.hpp"
#include "ewmaopt/ewma_analytic.hpp"
#include "ewmaopt/mc_oracle.hpp"
#include "ewmaopt/oc_fredholm.hpp"

using namespace ewmaopt;

static void BM_ArlSeries(benchmark::State& state) {
  const double lambda = 1.0 / static_cast<double>(state.range(0));
  const EwmaDesign d(lambda, 1.0, 1.4);
  const SeriesTruncation t{1e-12, 5000};
  for (auto _ : state) benchmark::DoNotOptimize(arl(d, t));
}
BENCHMARK(BM_ArlSeries)->Arg(2)->Arg(10)->Arg(50);

static void BM_Stadd(benchmark::State& state) {
  const ExpChangeModel m(1.0);
  const EwmaDesign d(0.1, 1.0, 1.6);
  for (auto _ : state) benchmark::DoNotOptimize(stadd(d, m));
}
BENCHMARK(BM_Stadd);

static void BM_NystromAssembly(benchmark::State& state) {
  const ExpChangeModel m(0.5);
  const auto kernel = ewma_kernel(m, 0.1, 1.4);
  const auto quad = Quadrature::uniform(1.4, static_cast<int>(state.range(0)), 10);
  for (auto _ : state) benchmark::DoNotOptimize(discretize(kernel, quad));
}
BENCHMARK(BM_NystromAssembly)->Arg(10)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

static void BM_NystromSolve(benchmark::State& state) {
  const ExpChangeModel m(0.5);
  const auto disc = discretize(ewma_kernel(m, 0.1, 1.4), Quadrature::uniform(1.4, 20, 10));
  for (auto _ : state) benchmark::DoNotOptimize(solve_iadd(disc));
}
BENCHMARK(BM_NystromSolve)->Unit(benchmark::kMillisecond);

static void BM_SaddClosedForm(benchmark::State& state) {
  const ExpChangeModel m(0.5);
  const EwmaDesign d(0.1, 1.0, 1.37);
  for (auto _ : state) benchmark::DoNotOptimize(profile(d, m));
}
BENCHMARK(BM_SaddClosedForm)->Unit(benchmark::kMillisecond);

static void BM_SrrProfile(benchmark::State& state) {
  const ExpChangeModel m(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(srr_profile(m, 500.0, 9.0));
}
BENCHMARK(BM_SrrProfile)->Unit(benchmark::kMillisecond);

static void BM_Calibrate(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(calibrate_ewma(0.1, 1.0, {1000.0, 1e-9}));
}
BENCHMARK(BM_Calibrate)->Unit(benchmark::kMillisecond);

static void BM_MonteCarloArl(benchmark::State& state) {
  const ExpChangeModel m(1.0);
  McConfig cfg;
  cfg.replications = static_cast<std::size_t>(state.range(0));
  cfg.threads = 1;
  const auto spec = ProcedureSpec::ewma(0.2, 0.5, 1.5);
  for (auto _ : state) benchmark::DoNotOptimize(estimate_arl(spec, m, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MonteCarloArl)->Arg(10000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
