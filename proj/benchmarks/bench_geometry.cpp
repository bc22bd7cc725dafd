#include <benchmark/benchmark.h>

#include <random>

#include "qcorr/geometry.hpp"

namespace {

std::vector<qcorr::geometry::Point2> cloud(std::size_t n) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<qcorr::geometry::Point2> pts(n);
  for (auto& p : pts) p = {u(rng), u(rng)};
  return pts;
}

void BM_Delaunay(benchmark::State& state) {
  const auto pts = cloud(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(qcorr::geometry::delaunay(pts));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Delaunay)->RangeMultiplier(4)->Range(16, 4096)->Complexity();

}  // namespace
