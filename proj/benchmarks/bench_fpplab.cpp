#include <cstdint>
#include <vector>

#include <benchmark/benchmark.h>

#include "fpplab/branching.hpp"
#include "fpplab/config_graph.hpp"
#include "fpplab/degree_model.hpp"
#include "fpplab/fpp_engine.hpp"
#include "fpplab/rng.hpp"
#include "fpplab/weights.hpp"

using namespace fpplab;

namespace {

WeightedMultiGraph regular_graph(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  const auto g = pair_half_edges(DegreeSequence(std::vector<std::uint32_t>(n, 3)), rng);
  return assign_weights(g, WeightLaw::exponential(1.0), rng);
}

void BM_PairHalfEdges(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const DegreeSequence seq(std::vector<std::uint32_t>(n, 3));
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(pair_half_edges(seq, rng));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(seq.total_degree()));
}
BENCHMARK(BM_PairHalfEdges)->Arg(1'000)->Arg(100'000);

void BM_SingleSource(benchmark::State& state) {
  const auto g = regular_graph(static_cast<std::size_t>(state.range(0)), 2);
  VertexId s = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(single_source_distances(g, s));
    s = (s + 7919) % static_cast<VertexId>(g.vertex_count());
  }
}
BENCHMARK(BM_SingleSource)->Arg(10'000)->Arg(100'000);

void BM_TwoBall(benchmark::State& state) {
  const auto g = regular_graph(static_cast<std::size_t>(state.range(0)), 3);
  const auto n = static_cast<VertexId>(g.vertex_count());
  VertexId u = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(two_ball_distance(g, u, (u + n / 2) % n));
    u = (u + 7919) % n;
  }
}
BENCHMARK(BM_TwoBall)->Arg(10'000)->Arg(100'000);

void BM_Diameter(benchmark::State& state) {
  const auto g = regular_graph(static_cast<std::size_t>(state.range(0)), 4);
  const DiameterOptions opts{.algorithm = state.range(1) == 0 ? DiameterAlgorithm::all_sources
                                                              : DiameterAlgorithm::bounded};
  for (auto _ : state) benchmark::DoNotOptimize(weighted_diameter(g, opts));
}
BENCHMARK(BM_Diameter)->Args({1'000, 0})->Args({1'000, 1})->Args({10'000, 1})
    ->Unit(benchmark::kMillisecond);

void BM_MaxExploration(benchmark::State& state) {
  const auto g = regular_graph(static_cast<std::size_t>(state.range(0)), 5);
  for (auto _ : state) benchmark::DoNotOptimize(max_exploration_time(g, 2.0));
}
BENCHMARK(BM_MaxExploration)->Arg(1'000)->Arg(10'000)->Unit(benchmark::kMillisecond);

void BM_Cmj(benchmark::State& state) {
  const auto spec =
      BranchingSpec::from_degree_law(DegreeDistribution::parse("3:1"), WeightLaw::exponential(1.0));
  Rng rng(6);
  const auto cap = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simulate_cmj(spec, SizeCap{cap}, rng));
}
BENCHMARK(BM_Cmj)->Arg(10'000)->Arg(100'000);

void BM_Malthusian(benchmark::State& state) {
  const auto closed = WeightLaw::gamma(2.0, 1.0);
  const auto numeric = WeightLaw::lomax(3.0, 1.0);
  const auto& law = state.range(0) == 0 ? closed : numeric;
  for (auto _ : state) benchmark::DoNotOptimize(malthusian_parameter(2.0, law));
}
BENCHMARK(BM_Malthusian)->Arg(0)->Arg(1);

}  // namespace

BENCHMARK_MAIN();
