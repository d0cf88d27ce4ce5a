#include "rasplit/resolvents.hpp"

#include <benchmark/benchmark.h>

#include <memory>

using namespace rasplit;

namespace {

void run_resolvent(benchmark::State& state, const ResolventOp& op, std::size_t n) {
  const Vec x = 50.0 * Vec::Random(static_cast<Eigen::Index>(n));
  for (auto _ : state) benchmark::DoNotOptimize(op.resolve(0.7, x));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}

void BM_Norm(benchmark::State& s) { run_resolvent(s, ResolventOp::norm(4096), 4096); }
void BM_Interval(benchmark::State& s) {
  run_resolvent(s, ResolventOp::dist_interval(Vec::Zero(4096), Vec::Ones(4096)), 4096);
}
void BM_Hinge(benchmark::State& s) { run_resolvent(s, ResolventOp::hinge(1.0, Vec::Ones(4096)), 4096); }
void BM_HardClip(benchmark::State& s) { run_resolvent(s, ResolventOp::hard_clip(Vec::Constant(4096, 30.0), 60.0), 4096); }
void BM_SoftClip(benchmark::State& s) { run_resolvent(s, ResolventOp::soft_clip(Vec::Constant(4096, 30.0), 90.0), 4096); }

void BM_Phase(benchmark::State& s) {
  const auto side = static_cast<std::size_t>(s.range(0));
  const GridShape g{side, side};
  auto c = std::make_shared<const PhaseConstraint>(g, PhaseConstraint::phase_of(g, Vec::Random(g.size())));
  run_resolvent(s, ResolventOp::phase(c), g.size());
}

BENCHMARK(BM_Norm);
BENCHMARK(BM_Interval);
BENCHMARK(BM_Hinge);
BENCHMARK(BM_HardClip);
BENCHMARK(BM_SoftClip);
BENCHMARK(BM_Phase)->Arg(32)->Arg(64);

}  // namespace
