#include "rasplit/problems.hpp"

#include <benchmark/benchmark.h>

using namespace rasplit;

namespace {

void BM_HingeStep(benchmark::State& state) {
  const auto f = static_cast<Framework>(state.range(0));
  const HingeSVM h = build_hinge_svm(60, 30, 1);
  Engine e(h.problem, f, EngineParams{});
  EngineState st = e.initial_state();
  ActivationSchedule sch(e.index_count(), static_cast<std::size_t>(state.range(1)), 2);
  for (auto _ : state) e.step(st, sch.sample());
  state.SetLabel(to_string(f));
}
BENCHMARK(BM_HingeStep)->ArgsProduct({{0, 1, 2, 3, 4}, {1, 8}});

void BM_SignalStep(benchmark::State& state) {
  const auto f = static_cast<Framework>(state.range(0));
  const SignalRestoration sr = build_signal_restoration(1000, 10, 1);
  Engine e(sr.problem, f, EngineParams{});
  EngineState st = e.initial_state();
  ActivationSchedule sch(e.index_count(), 4, 2);
  for (auto _ : state) e.step(st, sch.sample());
  state.SetLabel(to_string(f));
}
BENCHMARK(BM_SignalStep)->Arg(0)->Arg(1)->Arg(2);

void BM_PhaseStepF1(benchmark::State& state) {
  const PhaseRecon ph = build_phase_recon(32, 1);
  Engine e(ph.problem, Framework::F1, EngineParams{});
  EngineState st = e.initial_state();
  ActivationSchedule sch(e.index_count(), 8, 2);
  for (auto _ : state) e.step(st, sch.sample());
}
BENCHMARK(BM_PhaseStepF1);

}  // namespace
