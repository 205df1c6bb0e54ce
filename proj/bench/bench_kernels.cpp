// Serial reference vs OpenMP kernels, plus raw w(z) throughput.
// Thread count for the parallel runs is the benchmark argument.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "dit/faddeeva.hpp"
#include "dit/kernels.hpp"

namespace {

std::vector<double> time_grid(std::size_t n) {
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = 100.0 + 1100.0 * static_cast<double>(i) / static_cast<double>(n - 1);
  return t;
}

std::vector<dit::VisibilityTask> visibility_tasks() {
  std::vector<dit::VisibilityTask> tasks;
  for (int i = 0; i < 8; ++i) {
    const double k0I = -0.0005 - 0.0005 * i;
    const double norm = dit::norm_constant(dit::make_carrier(k0I));
    for (int j = 0; j < 4; ++j) tasks.push_back({k0I, 250.0 + 250.0 * j, norm});
  }
  return tasks;
}

void BM_TraceRowsSerial(benchmark::State& state) {
  const auto c = dit::make_carrier(-0.0015);
  const auto t = time_grid(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(dit::serial::trace_rows(c, 1000.0, t, 1.0));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_TraceRowsParallel(benchmark::State& state) {
  const auto c = dit::make_carrier(-0.0015);
  const auto t = time_grid(20000);
  dit::set_max_threads(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(dit::parallel::trace_rows(c, 1000.0, t, 1.0));
  dit::set_max_threads(0);
  state.SetItemsProcessed(state.iterations() * 20000);
}

void BM_VisibilitySerial(benchmark::State& state) {
  const auto tasks = visibility_tasks();
  for (auto _ : state) benchmark::DoNotOptimize(dit::serial::visibility_surface(tasks, {}));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(tasks.size()));
}

void BM_VisibilityParallel(benchmark::State& state) {
  const auto tasks = visibility_tasks();
  dit::set_max_threads(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(dit::parallel::visibility_surface(tasks, {}));
  dit::set_max_threads(0);
  state.SetItemsProcessed(state.iterations() * static_cast<long>(tasks.size()));
}

void BM_Wofz(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> re(-30.0, 30.0), im(0.0, 30.0);
  std::vector<dit::Complex> z(4096);
  for (auto& v : z) v = {re(rng), im(rng)};
  for (auto _ : state) {
    for (const auto& v : z) benchmark::DoNotOptimize(dit::wofz(v));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(z.size()));
}

}  // namespace

BENCHMARK(BM_TraceRowsSerial)->Arg(20000);
BENCHMARK(BM_TraceRowsParallel)->Arg(1)->Arg(2)->Arg(4)->UseRealTime();
BENCHMARK(BM_VisibilitySerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_VisibilityParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Wofz);

BENCHMARK_MAIN();
