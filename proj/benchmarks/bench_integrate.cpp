#include <benchmark/benchmark.h>

#include "invaria/analysis.hpp"
#include "invaria/integrate.hpp"

using namespace invaria;

static void BM_Rk4PaperRun(benchmark::State& state) {
  const ExtendedParams p = ExtendedParams::paper();
  const SystemModel m = make_extended2(p);
  const Vec2 e2 = analysis::equilibria(p, 11, 0.01).e2.point;
  const std::vector<double> x0{e2[0], e2[1]};
  const Drive drive = Drive::paper(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(integrate(m, x0, drive, IntegratorOptions{}));
  }
  state.SetItemsProcessed(state.iterations() * 40000);
}
BENCHMARK(BM_Rk4PaperRun)->Unit(benchmark::kMillisecond);

static void BM_Rk4Step(benchmark::State& state) {
  const SystemModel m = make_extended2(ExtendedParams::paper());
  const Drive drive = Drive::constant({11, 0.01, 0});
  Rk4Stepper stepper(m);
  std::vector<double> x{10.0, 4.0};
  double t = 0;
  for (auto _ : state) {
    stepper.step(t, 1e-6, x, drive);
    t += 1e-6;
    benchmark::DoNotOptimize(x.data());
  }
}
BENCHMARK(BM_Rk4Step);

static void BM_Rk4StepExpressionModel(benchmark::State& state) {
  const ExtendedParams p = ExtendedParams::paper();
  const SystemModel m = from_expressions(
      2, {"b*x1 + d + s*x2*(l*r - x1)", "-c*x2*(r - x1)"}, 0, p.bindings());
  const Drive drive = Drive::constant({11, 0.01, 0});
  Rk4Stepper stepper(m);
  std::vector<double> x{10.0, 4.0};
  double t = 0;
  for (auto _ : state) {
    stepper.step(t, 1e-6, x, drive);
    t += 1e-6;
    benchmark::DoNotOptimize(x.data());
  }
}
BENCHMARK(BM_Rk4StepExpressionModel);
