#include "rasplit/linops.hpp"

#include <benchmark/benchmark.h>

using namespace rasplit;

namespace {

std::vector<LinearOp> circulant_set(std::size_t side) {
  const GridShape g{side, side};
  return {LinearOp::circulant(kernels::gaussian(g, 3.0), g), LinearOp::circulant(kernels::uniform_vertical(g, 5), g),
          LinearOp::circulant(kernels::uniform_horizontal(g, 5), g), LinearOp::identity(g.size())};
}

void BM_GramSpectral(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const auto ops = circulant_set(side);
  const GramSolver q = GramSolver::build(1.0, ops);
  const Vec x = Vec::Random(static_cast<Eigen::Index>(side * side));
  for (auto _ : state) benchmark::DoNotOptimize(q.solve(x));
}
BENCHMARK(BM_GramSpectral)->Arg(32)->Arg(64)->Arg(128);

void BM_GramCholesky(benchmark::State& state) {
  const auto n = state.range(0);
  const std::vector<LinearOp> ops{LinearOp::dense(Eigen::MatrixXd::Random(n, n)),
                                  LinearOp::dense(Eigen::MatrixXd::Random(n / 2, n))};
  const GramSolver q = GramSolver::build(1.0, ops);
  const Vec x = Vec::Random(n);
  for (auto _ : state) benchmark::DoNotOptimize(q.solve(x));
}
BENCHMARK(BM_GramCholesky)->Arg(64)->Arg(256);

void BM_GramBuildSpectral(benchmark::State& state) {
  const auto ops = circulant_set(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(GramSolver::build(1.0, ops));
}
BENCHMARK(BM_GramBuildSpectral)->Arg(32)->Arg(64);

}  // namespace
