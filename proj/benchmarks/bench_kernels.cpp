#include <benchmark/benchmark.h>

#include "lpbmm/loss_grad.hpp"
#include "lpbmm/optimizer.hpp"
#include "lpbmm/spectral.hpp"
#include "lpbmm/synth.hpp"

using namespace lpbmm;

namespace {

// Shots fixed at 16, K and D from the benchmark arguments.
SynthTask task_for(const benchmark::State& state) {
  SynthConfig c;
  c.classes = static_cast<std::size_t>(state.range(0));
  c.dim = static_cast<std::size_t>(state.range(1));
  c.shots = 16;
  c.test_per_class = 1;
  return synth_task(c);
}

void BM_Evaluate(benchmark::State& state) {
  const SynthTask t = task_for(state);
  const Objective obj(t.split.support, t.text);
  const ProbeParams p = ProbeParams::zeros(t.text.classes(), t.text.dim());
  for (auto _ : state) benchmark::DoNotOptimize(obj.evaluate(p).loss);
  state.SetItemsProcessed(state.iterations() * t.split.support.size());
}
BENCHMARK(BM_Evaluate)->Args({10, 64})->Args({100, 512})->Args({200, 1024})->Unit(benchmark::kMillisecond);

void BM_PrototypeStep(benchmark::State& state) {
  const SynthTask t = task_for(state);
  const Objective obj(t.split.support, t.text);
  const StepSizes s = compute_step_sizes(t.split.support.features(), obj.similarity(), Taus{});
  ProbeState st(obj, ProbeParams::zeros(t.text.classes(), t.text.dim()));
  for (auto _ : state) st = step_block_w(std::move(st), s.gamma_w);
}
BENCHMARK(BM_PrototypeStep)->Args({10, 64})->Args({100, 512})->Args({200, 1024})->Unit(benchmark::kMillisecond);

void BM_MultiplierStep(benchmark::State& state) {
  const SynthTask t = task_for(state);
  const Objective obj(t.split.support, t.text);
  const StepSizes s = compute_step_sizes(t.split.support.features(), obj.similarity(), Taus{});
  ProbeState st(obj, ProbeParams::zeros(t.text.classes(), t.text.dim()));
  for (auto _ : state) st = step_block_alpha(std::move(st), s.gamma_alpha);
}
BENCHMARK(BM_MultiplierStep)->Args({10, 64})->Args({100, 512})->Args({200, 1024})->Unit(benchmark::kMillisecond);

void BM_PowerIteration(benchmark::State& state) {
  const SynthTask t = task_for(state);
  for (auto _ : state) benchmark::DoNotOptimize(power_iteration_gram(t.split.support.features()).lambda_max);
}
BENCHMARK(BM_PowerIteration)->Args({10, 64})->Args({100, 512})->Args({1000, 1024})->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
