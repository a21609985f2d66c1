// Serial reference vs OpenMP kernels. Run with --benchmark_counters_tabular=true.

#include <benchmark/benchmark.h>

#include "cvtele/channel.hpp"
#include "cvtele/epr.hpp"
#include "cvtele/teleport.hpp"

namespace {

using namespace cvtele;

void channel_args(benchmark::internal::Benchmark* b) {
  for (int n : {20, 40}) b->Arg(n);
  b->Unit(benchmark::kMillisecond);
}

void BM_ApplyChannelSerial(benchmark::State& state) {
  const FockDim d(static_cast<int>(state.range(0)));
  const auto rho = coherent_state(Complex(0.8, 0.0), d);
  const Kernel k = gaussian_kernel(0.3);
  for (auto _ : state) benchmark::DoNotOptimize(serial::apply_channel(k, rho));
}
BENCHMARK(BM_ApplyChannelSerial)->Apply(channel_args);

void BM_ApplyChannelParallel(benchmark::State& state) {
  const FockDim d(static_cast<int>(state.range(0)));
  const auto rho = coherent_state(Complex(0.8, 0.0), d);
  const Kernel k = gaussian_kernel(0.3);
  for (auto _ : state) benchmark::DoNotOptimize(apply_channel(k, rho));
}
BENCHMARK(BM_ApplyChannelParallel)->Apply(channel_args)->UseRealTime();

// The grid is resolved once so only the outcome integration is timed.
void BM_AverageOutputSerial(benchmark::State& state) {
  const FockDim d(static_cast<int>(state.range(0)));
  const auto rho = coherent_state(Complex(0.8, 0.0), d);
  const TwoModeState w = tmsv(0.5, d);
  const ChannelConfig cfg = protocol_config(rho, w);
  for (auto _ : state) benchmark::DoNotOptimize(serial::average_output(rho, w, cfg));
}
BENCHMARK(BM_AverageOutputSerial)->Apply(channel_args);

void BM_AverageOutputParallel(benchmark::State& state) {
  const FockDim d(static_cast<int>(state.range(0)));
  const auto rho = coherent_state(Complex(0.8, 0.0), d);
  const TwoModeState w = tmsv(0.5, d);
  const ChannelConfig cfg = protocol_config(rho, w);
  for (auto _ : state) benchmark::DoNotOptimize(average_output(rho, w, cfg));
}
BENCHMARK(BM_AverageOutputParallel)->Apply(channel_args)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
