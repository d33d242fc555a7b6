#include <benchmark/benchmark.h>

#include "orddid/identification.hpp"
#include "orddid/inference.hpp"
#include "orddid/simulate.hpp"

namespace {

using namespace orddid;

const PanelDataset& panel() {
  static const PanelDataset data = [] {
    DgpSpec s;
    s.n = 2000;
    s.seed = 7;
    return simulate_panel(s);
  }();
  return data;
}

BootstrapSpec boot_spec(int threads) {
  BootstrapSpec b;
  b.n_reps = 200;
  b.seed = 11;
  b.threads = threads;
  return b;
}

const Statistic kStat = [](const PanelDataset& d) { return did_statistic(d); };

void BM_BootstrapSerial(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(serial::block_bootstrap(panel(), kStat, boot_spec(1)));
  }
}

void BM_BootstrapParallel(benchmark::State& state) {
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(block_bootstrap(panel(), kStat, boot_spec(threads)));
  }
}

McOptions mc_options(int threads) {
  McOptions o;
  o.reps = 40;
  o.boot_reps = 0;
  o.seed = 3;
  o.threads = threads;
  return o;
}

void BM_EstimatorMcSerial(benchmark::State& state) {
  DgpSpec s;
  s.n = 2000;
  for (auto _ : state) benchmark::DoNotOptimize(serial::run_estimator_mc(s, mc_options(1)));
}

void BM_EstimatorMcParallel(benchmark::State& state) {
  DgpSpec s;
  s.n = 2000;
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_estimator_mc(s, mc_options(threads)));
}

}  // namespace

BENCHMARK(BM_BootstrapSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BootstrapParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EstimatorMcSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EstimatorMcParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
