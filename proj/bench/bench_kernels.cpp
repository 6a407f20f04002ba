#include "betaexp/kernels.hpp"

#include <benchmark/benchmark.h>

using namespace betaexp;

namespace {

// beta * 1000, k
void count_args(benchmark::internal::Benchmark* b) {
  b->Args({1300, 18})->Args({1500, 22})->Args({1800, 28});
}

void enumerate_args(benchmark::internal::Benchmark* b) {
  b->Args({1300, 14})->Args({1500, 18});
}

BetaContext context(const benchmark::State& state) {
  return BetaContext(Real(state.range(0)) / 1000);
}

Real centre(const BetaContext& ctx) { return ctx.one_over_beta_minus_one() / 2; }

void BM_CountParallel(benchmark::State& state) {
  const auto ctx = context(state);
  const auto k = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::count_parallel(ctx, centre(ctx), k));
}

void BM_CountSerial(benchmark::State& state) {
  const auto ctx = context(state);
  const auto k = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::reference::count_serial(ctx, centre(ctx), k));
}

void BM_EnumerateParallel(benchmark::State& state) {
  const auto ctx = context(state);
  const auto k = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::enumerate_parallel(ctx, centre(ctx), k, kDefaultSurvivorCap));
}

void BM_EnumerateSerial(benchmark::State& state) {
  const auto ctx = context(state);
  const auto k = static_cast<std::size_t>(state.range(1));
  for (auto _ : state)
    benchmark::DoNotOptimize(kernels::reference::enumerate_serial(ctx, centre(ctx), k, kDefaultSurvivorCap));
}

}  // namespace

BENCHMARK(BM_CountParallel)->Apply(count_args)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_CountSerial)->Apply(count_args)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_EnumerateParallel)->Apply(enumerate_args)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_EnumerateSerial)->Apply(enumerate_args)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
