#include <benchmark/benchmark.h>

#include "rwre/environment.hpp"
#include "rwre/walk.hpp"

namespace {

void BM_QuenchedNortheast(benchmark::State& state) {
  const rwre::Environment env(rwre::northeast_model(7));
  const auto steps = static_cast<std::size_t>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    auto out = rwre::run_quenched_outcome(env, rwre::Point{}, steps, rwre::stop::FixedLength{}, ++seed);
    benchmark::DoNotOptimize(out);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_QuenchedNortheast)->Arg(1000)->Arg(100000);

void BM_QuenchedAlphabet1D(benchmark::State& state) {
  const auto model = rwre::iid_alphabet_model(
      {rwre::nearest_neighbor_1d(0.7), rwre::nearest_neighbor_1d(0.9)}, {0.5, 0.5}, 1, 1, 3);
  const rwre::Environment env(model);
  const auto steps = static_cast<std::size_t>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    auto out = rwre::run_quenched_outcome(env, rwre::Point{}, steps, rwre::stop::FixedLength{}, ++seed);
    benchmark::DoNotOptimize(out);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_QuenchedAlphabet1D)->Arg(100000);

}  // namespace
