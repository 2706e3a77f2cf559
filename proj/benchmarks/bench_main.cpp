#include <benchmark/benchmark.h>

#include <vector>

#include "mwsched/bounds.hpp"
#include "mwsched/capacity.hpp"
#include "mwsched/simulator.hpp"

using namespace mwsched;

namespace {

// Slots per second of the full loop, symmetric ON/OFF at rho = 0.8 under LCQ.
void BM_SimulateLcq(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto params = CapacityParams::symmetric(n, 0.5);
  const auto lambda = scale_to_load(std::vector<double>(n, 1.0), params, 0.8);
  const Slot slots = 100'000;
  for (auto _ : state) {
    SimulationConfig cfg{ChannelModel::symmetric_on_off(n, 0.5), ArrivalModel::bernoulli(lambda),
                         SchedulerKind::lcq, slots, 1};
    benchmark::DoNotOptimize(run_simulation(cfg).qtot_mean);
  }
  state.SetItemsProcessed(state.iterations() * slots);
}
BENCHMARK(BM_SimulateLcq)->Arg(10)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_SimulateCounterexample(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Slot slots = 100'000;
  for (auto _ : state) {
    SimulationConfig cfg{ChannelModel::symmetric_multi_rate(n, {0.5, 0, 0, 0, 0, 0.5}),
                         ArrivalModel::uniform(ArrivalLaw::bernoulli, n, 3.0 / static_cast<double>(n)),
                         SchedulerKind::max_weight_multirate, slots, 1};
    benchmark::DoNotOptimize(run_simulation(cfg).z_mean);
  }
  state.SetItemsProcessed(state.iterations() * slots);
}
BENCHMARK(BM_SimulateCounterexample)->Arg(12)->Arg(60)->Unit(benchmark::kMillisecond);

// Exact load by subset enumeration for heterogeneous p.
void BM_LoadEnumerated(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> p(n), lambda(n);
  for (std::size_t i = 0; i < n; ++i) {
    p[i] = 0.3 + 0.6 * static_cast<double>(i) / static_cast<double>(n);
    lambda[i] = 0.5 / static_cast<double>(n);
  }
  const CapacityParams params(p);
  for (auto _ : state) benchmark::DoNotOptimize(onoff_load(lambda, params).rho);
}
BENCHMARK(BM_LoadEnumerated)->DenseRange(8, 20, 4)->Unit(benchmark::kMicrosecond);

void BM_LoadSymmetric(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto params = CapacityParams::symmetric(n, 0.5);
  std::vector<double> lambda(n);
  for (std::size_t i = 0; i < n; ++i) lambda[i] = 0.8 * (1.0 + static_cast<double>(i % 7)) / (4.0 * n);
  for (auto _ : state) benchmark::DoNotOptimize(onoff_load(lambda, params).rho);
}
BENCHMARK(BM_LoadSymmetric)->Arg(100)->Arg(10000);

// Grouped LCQ bound including the search over K.
void BM_GeneralBound(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto params = CapacityParams::symmetric(n, 0.5);
  const auto lambda = scale_to_load(std::vector<double>(n, 1.0), params, 0.8);
  const auto moments = arrival_moments(ArrivalModel::bernoulli(lambda));
  for (auto _ : state) benchmark::DoNotOptimize(general_lcq_bound(lambda, params, moments, 0.8).delay_bound);
}
BENCHMARK(BM_GeneralBound)->Arg(10)->Arg(100)->Arg(1000);

}  // namespace
BENCHMARK_MAIN();
