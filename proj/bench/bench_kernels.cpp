#include <benchmark/benchmark.h>

#include <vector>

#include "fairmatch/algorithms.hpp"
#include "fairmatch/harness.hpp"
#include "fairmatch/rounding.hpp"
#include "fairmatch/trials.hpp"

using namespace fairmatch;

namespace {

Execution exec_of(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::Serial : Execution::Parallel;
}

const Instance& nyc() {
  static const Instance inst = ingest_trips(synthetic_trips({}), {}).instance;
  return inst;
}

void BM_PivotTableau(benchmark::State& state) {
  const std::size_t rows = 400, cols = 1200;
  Rng rng = make_rng(1);
  std::vector<double> base(rows * cols);
  for (auto& x : base) x = uniform01(rng) + 0.5;
  std::vector<double> t;
  for (auto _ : state) {
    state.PauseTiming();
    t = base;
    state.ResumeTiming();
    pivot_tableau(t, rows, cols, 7, 11, exec_of(state));
    benchmark::DoNotOptimize(t.data());
  }
}
BENCHMARK(BM_PivotTableau)->Arg(0)->Arg(1);

void BM_DependentRound(benchmark::State& state) {
  Rng rng = make_rng(2);
  std::vector<double> x(64);
  for (auto& v : x) v = uniform01(rng);
  for (auto _ : state) benchmark::DoNotOptimize(dependent_round(x, rng));
}
BENCHMARK(BM_DependentRound);

void BM_NycBenchmarks(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(benchmarks(nyc(), exec_of(state)));
}
BENCHMARK(BM_NycBenchmarks)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_TsfTrials(benchmark::State& state) {
  const Instance inst = fragment_types(make_hardness_group_instance(9));
  const auto bundle = benchmarks(inst);
  const TsfPolicy policy(inst, bundle, {1.0 / 3, 1.0 / 3, 1.0 / 3});
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_trials(10000, 1, [&](std::uint64_t s) { return policy.run(s); }, exec_of(state)));
  }
}
BENCHMARK(BM_TsfTrials)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_EstimateRho(benchmark::State& state) {
  const Instance inst = as_kad(fragment_types(make_hardness_group_instance(9)));
  const auto bundle = benchmarks(inst);
  const TsfKadPolicy policy(inst, bundle, {1.0 / 3, 1.0 / 3, 1.0 / 3});
  for (auto _ : state) benchmark::DoNotOptimize(estimate_rho(policy, 5000, 1, exec_of(state)));
}
BENCHMARK(BM_EstimateRho)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
