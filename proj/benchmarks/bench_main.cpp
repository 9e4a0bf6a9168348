#include <benchmark/benchmark.h>

#include "shearlab/malliavin.hpp"
#include "shearlab/spectral.hpp"
#include "shearlab/stochastic.hpp"

using namespace shearlab;

namespace {

void BM_Propagate(benchmark::State& state) {
  const int n_y = static_cast<int>(state.range(0));
  const auto gen = build_generator(ModeProblem{1, 1e-4, n_y, ShearProfile::preset("sin")});
  for (auto _ : state) {
    benchmark::DoNotOptimize(semigroup_norm(propagate(gen, 100.0)));
  }
}
BENCHMARK(BM_Propagate)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_DecayTime(benchmark::State& state) {
  const ModeProblem p{1, 1e-4, static_cast<int>(state.range(0)), ShearProfile::preset("sin")};
  for (auto _ : state) {
    benchmark::DoNotOptimize(decay_time(p));
  }
}
BENCHMARK(BM_DecayTime)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_SamplePath(benchmark::State& state) {
  const int steps = static_cast<int>(state.range(0));
  std::uint64_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_path(1, i++, 1.0 / steps, steps));
  }
  state.SetItemsProcessed(state.iterations() * steps);
}
BENCHMARK(BM_SamplePath)->Arg(1024)->Arg(4096);

void BM_MalliavinSample(benchmark::State& state) {
  const int steps = static_cast<int>(state.range(0));
  const bool kernel = state.range(1) != 0;
  const auto u = ShearProfile::preset("cos");
  const auto path = sample_path(1, 0, 16.0 / steps, steps);
  for (auto _ : state) {
    benchmark::DoNotOptimize(malliavin_sample(u, 0.0, 1e-4, 16.0, path, kernel));
  }
}
BENCHMARK(BM_MalliavinSample)->Args({4096, 0})->Args({256, 1})->Args({1024, 1})->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
