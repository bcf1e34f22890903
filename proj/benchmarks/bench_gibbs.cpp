#include <benchmark/benchmark.h>

#include "rwre/gibbs.hpp"
#include "rwre/volume.hpp"

namespace {

void BM_ExactConditionalChain(benchmark::State& state) {
  const auto spec = rwre::ising_spec(
      1, {rwre::nearest_neighbor_1d(0.9), rwre::nearest_neighbor_1d(0.4)}, 1.0, 0.0, 0.3);
  const auto n = state.range(0);
  const auto volume = rwre::FiniteVolume::interval(0, n - 1).sites();
  const rwre::Configuration boundary(1, rwre::Point(-1), rwre::Point(n), 0);
  for (auto _ : state) {
    auto table = rwre::exact_conditional(spec, volume, boundary);
    benchmark::DoNotOptimize(table);
  }
  state.counters["configs"] = static_cast<double>(1 << n);
}
BENCHMARK(BM_ExactConditionalChain)->Arg(6)->Arg(12)->Arg(18);

void BM_GlauberWindow(benchmark::State& state) {
  const auto spec = rwre::ising_spec(
      1, {rwre::nearest_neighbor_1d(0.9), rwre::nearest_neighbor_1d(0.4)}, 1.0, 0.0, 0.3);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    auto field = rwre::glauber_sample(spec, rwre::Point(-100), rwre::Point(100), 0, 100, ++seed);
    benchmark::DoNotOptimize(field);
  }
}
BENCHMARK(BM_GlauberWindow);

}  // namespace
