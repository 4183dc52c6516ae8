// Serial reference vs OpenMP kernels, and optimized vs naive inner loops.

#include <benchmark/benchmark.h>

#include "kcsep/constraints.hpp"
#include "kcsep/gradient.hpp"
#include "kcsep/lattice.hpp"
#include "kcsep/rng.hpp"
#include "kcsep/simulator.hpp"

namespace {

using kcsep::Exec;

Exec exec_of(const benchmark::State& state) { return state.range(0) == 0 ? Exec::kSerial : Exec::kParallel; }

void BM_ExactExpectation(benchmark::State& state) {
  const auto spec = kcsep::ModelSpec::interpolating(1, 0.5, 8);
  for (auto _ : state) benchmark::DoNotOptimize(kcsep::exact_expectation(spec, 0.7, exec_of(state)));
}
BENCHMARK(BM_ExactExpectation)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_VerifyGradient(benchmark::State& state) {
  const auto spec = kcsep::ModelSpec::interpolating(1, 0.5, 4);
  for (auto _ : state) benchmark::DoNotOptimize(kcsep::verify_gradient(spec, 12, 1e-10, exec_of(state)));
}
BENCHMARK(BM_VerifyGradient)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Realizations(benchmark::State& state) {
  kcsep::ModelSpec spec = kcsep::ModelSpec::pmm(2);
  const kcsep::RunConfig config{128, 0.01, {0.01}, 1.0 / 32};
  const kcsep::Profile profile = [](double) { return 0.5; };
  for (auto _ : state) benchmark::DoNotOptimize(kcsep::run_realizations(spec, config, profile, 7, 8, exec_of(state)));
}
BENCHMARK(BM_Realizations)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

kcsep::Configuration random_configuration(int n, std::uint64_t seed) {
  kcsep::Rng rng(seed);
  kcsep::Configuration cfg(n);
  for (int x = 0; x < n; ++x) cfg.set(x, rng.uniform() < 0.5 ? 1 : 0);
  return cfg;
}

void BM_WindowCountPopcount(benchmark::State& state) {
  const auto cfg = random_configuration(4096, 1);
  const auto w = kcsep::node_window(5, 40);
  std::int64_t x = 0;
  for (auto _ : state) benchmark::DoNotOptimize(kcsep::window_count(cfg, x++, w));
}
BENCHMARK(BM_WindowCountPopcount);

void BM_WindowCountNaive(benchmark::State& state) {
  const auto cfg = random_configuration(4096, 1);
  const auto w = kcsep::node_window(5, 40);
  std::int64_t x = 0;
  for (auto _ : state) benchmark::DoNotOptimize(kcsep::window_count_naive(cfg, x++, w));
}
BENCHMARK(BM_WindowCountNaive);

void BM_ConstraintKernel(benchmark::State& state) {
  const auto spec = kcsep::ModelSpec::interpolating(1, 0.5, 22);
  const kcsep::ConstraintKernel kernel(spec);
  const auto cfg = random_configuration(512, 2);
  std::int64_t x = 0;
  for (auto _ : state) benchmark::DoNotOptimize(kernel.at(cfg, x++));
}
BENCHMARK(BM_ConstraintKernel);

void BM_ConstraintReference(benchmark::State& state) {
  const auto spec = kcsep::ModelSpec::interpolating(1, 0.5, 22);
  const auto cfg = random_configuration(512, 2);
  std::int64_t x = 0;
  for (auto _ : state) benchmark::DoNotOptimize(kcsep::constraint_value(cfg, x++, spec));
}
BENCHMARK(BM_ConstraintReference);

}  // namespace

BENCHMARK_MAIN();
