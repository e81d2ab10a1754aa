#include <benchmark/benchmark.h>

#include "nlact/criteria.hpp"
#include "nlact/harness.hpp"
#include "nlact/protocols.hpp"
#include "nlact/states.hpp"

using namespace nlact;

static void BM_Eigvalsh(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  int dims_n = n;
  const auto rho = states::random_mixed_hs({dims_n}, {1, 0});
  for (auto _ : state) benchmark::DoNotOptimize(qcore::eigvalsh(rho.matrix()));
}
BENCHMARK(BM_Eigvalsh)->Arg(4)->Arg(16)->Arg(64)->Arg(729);

static void BM_Classify(benchmark::State& state) {
  const auto rho = states::random_mixed_hs({2, 2}, {1, 0});
  for (auto _ : state) benchmark::DoNotOptimize(criteria::classify(rho));
}
BENCHMARK(BM_Classify);

static void BM_Census(benchmark::State& state) {
  harness::ExperimentConfig cfg;
  cfg.n_states = static_cast<std::size_t>(state.range(0));
  cfg.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(harness::run_census(cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Census)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_DoubleTeleport(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const auto phi = states::max_entangled(d);
  for (auto _ : state)
    benchmark::DoNotOptimize(protocols::double_teleport(phi, 0.7, {{0, 0}, {1, 1}}));
}
BENCHMARK(BM_DoubleTeleport)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

static void BM_SweepState(benchmark::State& state) {
  harness::ExperimentConfig cfg;
  cfg.experiment = harness::Experiment::decoherence_sweep;
  cfg.n_states = 1;
  cfg.n_time_steps = 200;
  cfg.threads = 1;
  cfg.keep_steps = false;
  for (auto _ : state) benchmark::DoNotOptimize(harness::run_decoherence_sweep(cfg));
}
BENCHMARK(BM_SweepState)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
