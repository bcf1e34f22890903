#include <benchmark/benchmark.h>

#include "rwre/environment.hpp"
#include "rwre/green.hpp"
#include "rwre/volume.hpp"

namespace {

void BM_OccupancyBox2D(benchmark::State& state) {
  const auto model = rwre::dirichlet_model(rwre::unit_vectors(2), {1.0, 1.0, 1.0, 1.0}, 2, 1, 5);
  const rwre::Environment env(model);
  const auto volume = rwre::FiniteVolume::centred_box(state.range(0), 2, 1);
  for (auto _ : state) {
    auto table = rwre::occupancy(env, volume, rwre::Point{}, {});
    benchmark::DoNotOptimize(table);
  }
  state.counters["sites"] = static_cast<double>(volume.size());
}
BENCHMARK(BM_OccupancyBox2D)->Arg(3)->Arg(8)->Arg(15);

void BM_Green1DColumn(benchmark::State& state) {
  const auto model = rwre::iid_alphabet_model(
      {rwre::nearest_neighbor_1d(0.7), rwre::nearest_neighbor_1d(0.9)}, {0.5, 0.5}, 1, 1, 3);
  const rwre::Environment env(model);
  const rwre::Coord half = state.range(0);
  for (auto _ : state) {
    const rwre::Green1D green(env, -half, half);
    auto col = green.column(0);
    benchmark::DoNotOptimize(col);
  }
}
BENCHMARK(BM_Green1DColumn)->Arg(256)->Arg(4096);

}  // namespace
