// Serial reference versus OpenMP for the sampled verification kernels.

#include <benchmark/benchmark.h>

#include "retard_oc/registry.hpp"
#include "retard_oc/sufficiency.hpp"

using namespace retard_oc;

namespace {

Execution mode(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::serial : Execution::parallel;
}

void BM_VerifyStateLinear(benchmark::State& state) {
  const auto p = linear_example_problem();
  const auto c = linear_example_candidate();
  LinearVerifyConfig cfg;
  cfg.execution = mode(state);
  cfg.convexity.execution = mode(state);
  cfg.grid_points_per_cell = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(verify_state_linear(p, c, cfg).overall());
}

void BM_Maximality(benchmark::State& state) {
  const auto p = linear_example_problem();
  const auto c = linear_example_candidate();
  const auto eta = linear_example_adjoint();
  MaximalityOptions opt;
  opt.execution = mode(state);
  opt.grid_points_per_cell = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(check_maximality(p, c, eta, opt).worst_residual);
}

void BM_VerifyHJ(benchmark::State& state) {
  const auto p = goellmann_problem();
  const auto c = goellmann_candidate();
  const auto S = goellmann_value_function();
  const auto fb = goellmann_feedback();
  HJConfig cfg;
  cfg.execution = mode(state);
  cfg.samples = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(verify_nonlinear_hj(p, c, S, fb, cfg).overall());
}

}  // namespace

BENCHMARK(BM_VerifyStateLinear)->ArgsProduct({{0, 1}, {64, 256}})->ArgNames({"parallel", "per_cell"})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Maximality)->ArgsProduct({{0, 1}, {64, 512}})->ArgNames({"parallel", "per_cell"})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_VerifyHJ)->ArgsProduct({{0, 1}, {1000, 10000}})->ArgNames({"parallel", "samples"})->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
