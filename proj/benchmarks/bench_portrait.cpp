#include <benchmark/benchmark.h>

#include "qcorr/numkernel.hpp"
#include "qcorr/portrait.hpp"

namespace {

using namespace qcorr;

void BM_SampleGrid(benchmark::State& state) {
  const std::vector<numkernel::Root> roots{{1.0, 2}, {2.0, 1}, {4.0, 1}, {-1.0, 2}};
  const numkernel::DenseMatrix a = numkernel::companion_matrix(roots);
  const auto grid = portrait::Grid::covering({-2, 5, -2, 2}, 7.0 / static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(portrait::sample_grid(a, grid));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid.nx * grid.ny));
}
BENCHMARK(BM_SampleGrid)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace
