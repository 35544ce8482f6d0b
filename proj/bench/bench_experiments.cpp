// Serial reference loop vs. OpenMP worker pool on the flexibility sweep.
#include <benchmark/benchmark.h>

#include "yardcrp/experiments.hpp"

namespace {

yardcrp::FlexConfig sweep() {
  yardcrp::FlexConfig cfg;
  cfg.columns_list = {4};
  cfg.filled = 3;
  cfg.m_list = {0, 1};
  cfg.instances = 16;
  return cfg;
}

void BM_FlexSerial(benchmark::State& state) {
  yardcrp::RunOptions o;
  o.parallel = false;
  for (auto _ : state) benchmark::DoNotOptimize(yardcrp::run_flexibility(sweep(), o));
}

void BM_FlexParallel(benchmark::State& state) {
  yardcrp::RunOptions o;
  o.jobs = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(yardcrp::run_flexibility(sweep(), o));
}

void BM_SolveSingle(benchmark::State& state) {
  yardcrp::GeneratorConfig g;
  g.seed = static_cast<std::uint64_t>(state.range(0));
  const auto inst = yardcrp::generate(g);
  for (auto _ : state) benchmark::DoNotOptimize(yardcrp::solve(inst));
}

}  // namespace

BENCHMARK(BM_FlexSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FlexParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SolveSingle)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
