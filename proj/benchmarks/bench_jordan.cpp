#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qcorr/jordan.hpp"

namespace {

using namespace qcorr;

// Jittered 2*rho-gon rings around the origin.
std::vector<geometry::Point2> rings(int rho, int count) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> jitter(0.0, 0.01);
  std::vector<geometry::Point2> pts;
  for (int k = 0; k < count; ++k) {
    const double r = 1.0 + 0.5 * k;
    for (int i = 0; i < 2 * rho; ++i) {
      const double a = std::numbers::pi * i / rho;
      pts.push_back({r * std::cos(a) + jitter(rng), r * std::sin(a) + jitter(rng)});
    }
  }
  return pts;
}

void BM_CongruentPairs(benchmark::State& state) {
  const auto pts = rings(3, static_cast<int>(state.range(0)));
  const auto tris = jordan::triangles_for(pts);
  for (auto _ : state) benchmark::DoNotOptimize(jordan::congruent_pairs(tris, 0.1));
  state.counters["triangles"] = static_cast<double>(tris.size());
}
BENCHMARK(BM_CongruentPairs)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace
