#include <benchmark/benchmark.h>

#include <vector>

#include "nwtd/compute/common.hpp"
#include "nwtd/compute/parallel.hpp"
#include "nwtd/compute/serial.hpp"
#include "nwtd/diffusion.hpp"
#include "nwtd/estimators.hpp"

using namespace nwtd;
using compute::Axes;
using compute::Variances;

namespace {

PairSample ou_pairs(std::size_t n_copies) {
  const auto ens = simulate_ensemble(ModelSpec::defaults(ModelKind::ou), n_copies, 1000, 0.02, 4);
  return extract_pairs(ens, 0, 10, 1);
}

std::vector<Variances> variances(int count) {
  std::vector<Variances> v;
  for (int k = 1; k <= count; ++k) {
    const double h = 0.02 * k;
    v.push_back({h * h + 0.0004, h * h + 0.0004});
  }
  return v;
}

const std::vector<double> kGrid = EvalGrid::linspace(-2.5, 2.5, 64);

void BM_smooth2d_serial(benchmark::State& state) {
  const auto p = ou_pairs(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(serial::smooth_2d(p.from, p.to, 0.1, 0.1, kGrid, kGrid));
}

void BM_smooth2d_parallel(benchmark::State& state) {
  const auto p = ou_pairs(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(parallel::smooth_2d(p.from, p.to, 0.1, 0.1, kGrid, kGrid));
}

void BM_same_copy_serial(benchmark::State& state) {
  const auto p = ou_pairs(state.range(0));
  const auto v = variances(30);
  for (auto _ : state) benchmark::DoNotOptimize(serial::same_copy_sums(p, Axes::xy, 1, v));
}

void BM_same_copy_direct(benchmark::State& state) {
  const auto p = ou_pairs(state.range(0));
  const auto v = variances(30);
  for (auto _ : state) benchmark::DoNotOptimize(parallel::same_copy_sums_direct(p, Axes::xy, 1, v));
}

void BM_same_copy_histogram(benchmark::State& state) {
  const auto p = ou_pairs(state.range(0));
  const auto v = variances(30);
  for (auto _ : state) benchmark::DoNotOptimize(parallel::same_copy_sums(p, Axes::xy, 1, v));
}

void BM_cross_serial(benchmark::State& state) {
  const auto p = ou_pairs(state.range(0));
  const auto v = variances(10);
  for (auto _ : state) benchmark::DoNotOptimize(serial::cross_sums(p, Axes::xy, v));
}

void BM_cross_direct(benchmark::State& state) {
  const auto p = ou_pairs(state.range(0));
  const auto v = variances(10);
  for (auto _ : state) benchmark::DoNotOptimize(parallel::cross_sums_direct(p, Axes::xy, v));
}

void BM_cross_spectral(benchmark::State& state) {
  const auto p = ou_pairs(state.range(0));
  const auto v = variances(10);
  for (auto _ : state) benchmark::DoNotOptimize(parallel::cross_sums_spectral(p, Axes::xy, v));
}

}  // namespace

BENCHMARK(BM_smooth2d_serial)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_smooth2d_parallel)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_same_copy_serial)->Arg(10)->Arg(40)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_same_copy_direct)->Arg(10)->Arg(40)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_same_copy_histogram)->Arg(10)->Arg(40)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_cross_serial)->Arg(2)->Arg(5)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_cross_direct)->Arg(2)->Arg(5)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_cross_spectral)->Arg(2)->Arg(5)->Arg(100)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
