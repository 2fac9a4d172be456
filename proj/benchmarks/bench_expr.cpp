#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "invaria/expr.hpp"

namespace ex = invaria::expr;

namespace {

const char* kAlphaB = "(x2 + s*x1*(l*r - x2) - b*x2)/(s*(l*r - x2))";

}  // namespace

static void BM_Parse(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(ex::parse(kAlphaB));
}
BENCHMARK(BM_Parse);

static void BM_EvalTree(benchmark::State& state) {
  const ex::Expr e = ex::parse(kAlphaB);
  const ex::Bindings env{{"x1", 2.0}, {"x2", 3.0}, {"s", 0.25}, {"l", 0.7}, {"r", 11.0}, {"b", 0.6}};
  for (auto _ : state) benchmark::DoNotOptimize(ex::eval(e, env));
}
BENCHMARK(BM_EvalTree);

static void BM_EvalCompiled(benchmark::State& state) {
  const std::vector<std::string> slots{"x1", "x2", "s", "l", "r", "b"};
  const ex::CompiledExpr c(ex::parse(kAlphaB), slots);
  const std::vector<double> vals{2.0, 3.0, 0.25, 0.7, 11.0, 0.6};
  for (auto _ : state) benchmark::DoNotOptimize(c(vals));
}
BENCHMARK(BM_EvalCompiled);

static void BM_PartialFd(benchmark::State& state) {
  const ex::Expr e = ex::parse(kAlphaB);
  const ex::Bindings env{{"x1", 2.0}, {"x2", 3.0}, {"s", 0.25}, {"l", 0.7}, {"r", 11.0}, {"b", 0.6}};
  for (auto _ : state) benchmark::DoNotOptimize(ex::partial_fd(e, env, "x2"));
}
BENCHMARK(BM_PartialFd);
