#include <benchmark/benchmark.h>

#include "invaria/analysis.hpp"

using namespace invaria;

static void BM_BasinGrid(benchmark::State& state) {
  const ExtendedParams p = ExtendedParams::paper();
  const auto n = static_cast<std::size_t>(state.range(0));
  analysis::BasinOptions o;
  o.threads = static_cast<unsigned>(state.range(1));
  const analysis::PhaseGrid grid{{-2, 20, n}, {0, 10, n}};
  for (auto _ : state) benchmark::DoNotOptimize(analysis::basin_sample(p, 11, 0.01, grid, o));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n));
}
BENCHMARK(BM_BasinGrid)->Args({11, 1})->Args({11, 0})->Args({21, 0})->Unit(benchmark::kMillisecond);

static void BM_VectorField(benchmark::State& state) {
  const ExtendedParams p = ExtendedParams::paper();
  const analysis::PhaseGrid grid{{-2, 20, 101}, {0, 10, 101}};
  for (auto _ : state) benchmark::DoNotOptimize(analysis::vector_field(p, 11, 0.01, grid));
}
BENCHMARK(BM_VectorField);
