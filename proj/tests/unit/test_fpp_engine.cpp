#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "doctest.h"
#include "fpplab/fpp_engine.hpp"
#include "oracles.hpp"

using namespace fpplab;

namespace {

// w(0,1) = 1, w(1,2) = 2, w(0,2) = 4
WeightedMultiGraph triangle() { return WeightedMultiGraph(3, {{0, 1, 1.0}, {1, 2, 2.0}, {0, 2, 4.0}}); }

WeightedMultiGraph regular_graph(std::size_t n, std::uint32_t d, std::uint64_t seed,
                                 const WeightLaw& law = WeightLaw::exponential(1.0)) {
  Rng rng(seed);
  const auto g = pair_half_edges(DegreeSequence(std::vector<std::uint32_t>(n, d)), rng);
  return assign_weights(g, law, rng);
}

// Smallest candidate time at which the replayed active count reaches C.
double replay_threshold(const WeightedMultiGraph& g, const std::vector<double>& dist, std::size_t C) {
  std::set<double> times{0.0};
  for (double d : dist)
    if (std::isfinite(d)) times.insert(d);
  for (const auto& e : g.edges()) {
    const double t = std::min(dist[e.u], dist[e.v]) + e.w;
    if (std::isfinite(t)) times.insert(t);
  }
  for (double t : times)
    if (oracle::replay_active(g, dist, t) >= C) return t;
  return kInfinity;
}

}  // namespace

TEST_CASE("distances on a triangle") {
  const auto g = triangle();
  const auto m = single_source_distances(g, 0);
  CHECK(m.dist == std::vector<double>{0.0, 1.0, 3.0});
  CHECK_FALSE(m.predecessor[0].has_value());
  CHECK(m.predecessor[1] == 0u);
  CHECK(m.predecessor[2] == 1u);
  CHECK(weighted_distance(g, 1, 1) == 0.0);
  CHECK(weighted_distance(g, 1, 2) == 2.0);
  CHECK(flooding_time(g, 0) == 3.0);
  CHECK(weighted_diameter(g) == 3.0);
  CHECK(two_ball_distance(g, 0, 2).distance == 3.0);
  CHECK_THROWS_AS(two_ball_distance(g, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(single_source_distances(g, 3), std::out_of_range);
}

TEST_CASE("small special graphs") {
  const WeightedMultiGraph single(1, {});
  CHECK(flooding_time(single, 0) == 0.0);
  CHECK(weighted_diameter(single) == 0.0);

  const WeightedMultiGraph parallel(2, {{0, 1, 5.0}, {0, 1, 2.0}});
  CHECK(weighted_diameter(parallel) == 2.0);
  CHECK(weighted_distance(parallel, 1, 0) == 2.0);

  const WeightedMultiGraph split(4, {{0, 1, 1.0}, {2, 3, 7.0}, {3, 3, 0.5}});
  CHECK(weighted_distance(split, 0, 2) == kInfinity);
  CHECK(flooding_time(split, 0) == kInfinity);
  CHECK(component_flooding_time(split, 2) == 7.0);
  CHECK(weighted_diameter(split) == kInfinity);
  CHECK(component_diameter(split, 3) == 7.0);
  CHECK(two_ball_distance(split, 1, 3).distance == kInfinity);

  const WeightedMultiGraph unweighted(2, {{0, 1, NAN}});
  CHECK_THROWS_AS(single_source_distances(unweighted, 0), std::invalid_argument);
}

TEST_CASE("distance operations agree with path enumeration") {
  Rng rng(314);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + trial % 8;
    const auto g = oracle::random_small_multigraph(rng, n);
    const auto exact = oracle::all_pairs_by_enumeration(g);
    double diam = 0.0;
    for (VertexId u = 0; u < n; ++u) {
      const auto m = single_source_distances(g, u);
      double flood = 0.0;
      for (VertexId v = 0; v < n; ++v) {
        REQUIRE(std::abs(m.dist[v] - exact[u][v]) <= 1e-9);
        REQUIRE(std::abs(weighted_distance(g, u, v) - exact[u][v]) <= 1e-9);
        if (u != v) REQUIRE(std::abs(two_ball_distance(g, u, v).distance - exact[u][v]) <= 1e-9);
        flood = std::max(flood, exact[u][v]);
      }
      REQUIRE(std::abs(flooding_time(g, u) - flood) <= 1e-9);
      diam = std::max(diam, flood);
    }
    REQUIRE(std::abs(weighted_diameter(g) - diam) <= 1e-9);
  }
}

TEST_CASE("predecessors describe shortest paths") {
  const auto g = regular_graph(500, 3, 1);
  const auto m = single_source_distances(g, 7);
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    if (v == 7) continue;
    REQUIRE(m.predecessor[v].has_value());
    const VertexId p = *m.predecessor[v];
    double best = kInfinity;
    for (const auto& inc : g.neighbors(p))
      if (inc.neighbor == v) best = std::min(best, inc.w);
    CHECK(m.dist[p] + best == m.dist[v]);
  }
}

TEST_CASE("metric properties on sampled triples") {
  const auto g = regular_graph(400, 3, 2, WeightLaw::gamma(2.0, 1.0));
  std::vector<std::vector<double>> d;
  for (VertexId u = 0; u < g.vertex_count(); ++u) d.push_back(single_source_distances(g, u).dist);
  Rng rng(3);
  std::uniform_int_distribution<VertexId> pick(0, 399);
  for (int i = 0; i < 20'000; ++i) {
    const auto a = pick(rng), b = pick(rng), c = pick(rng);
    REQUIRE(d[a][a] == 0.0);
    REQUIRE(d[a][b] == doctest::Approx(d[b][a]).epsilon(1e-12));
    REQUIRE(d[a][c] <= d[a][b] + d[b][c] + 1e-12);
  }
}

TEST_CASE("flooding time brackets the diameter") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto g = regular_graph(600, 3, 10 + seed);
    const double diam = weighted_diameter(g);
    for (VertexId a = 0; a < g.vertex_count(); a += 37) {
      const double flood = flooding_time(g, a);
      CHECK(flood <= diam);
      CHECK(diam <= 2.0 * flood);
    }
  }
}

TEST_CASE("bounded diameter search equals all-sources sweeps") {
  Rng rng(77);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 20 + trial * 25;
    const auto g = oracle::random_small_multigraph(rng, n, 5, trial % 4 != 0);
    DiameterOptions all{DiameterAlgorithm::all_sources};
    std::size_t sweeps = 0;
    DiameterOptions bounded{DiameterAlgorithm::bounded, 1, &sweeps};
    CHECK(weighted_diameter(g, bounded) == weighted_diameter(g, all));
    CHECK(component_diameter(g, 0, bounded) == component_diameter(g, 0, all));
    CHECK(sweeps >= 1);
  }
  const auto g = regular_graph(2000, 3, 5);
  DiameterOptions threaded{DiameterAlgorithm::all_sources, 2};
  CHECK(weighted_diameter(g) == weighted_diameter(g, threaded));
}

TEST_CASE("two-ball search equals single-source distances exactly") {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto g = regular_graph(3000, 3, 100 + seed);
    Rng rng(seed);
    std::uniform_int_distribution<VertexId> pick(0, 2999);
    for (int i = 0; i < 60; ++i) {
      const auto u = pick(rng);
      auto v = pick(rng);
      if (u == v) continue;
      const auto r = two_ball_distance(g, u, v);
      REQUIRE(r.distance == single_source_distances(g, u).dist[v]);
      CHECK(r.settled_u >= 1);
      CHECK(r.settled_v >= 1);
      CHECK(r.half_edges_u >= g.degree(u));
    }
  }
}

TEST_CASE("exploration on the triangle") {
  // From 0: active 2 at t = 0; edge (0,1) at t = 1 discovers 1 (active 2);
  // edge (1,2) at t = 3 discovers 2 (active 2); edge (0,2) at t = 4 closes
  // the cycle (active 0). Four active half-edges never occur.
  const std::vector<std::size_t> targets{1, 2, 4};
  const auto tr = exploration_trace(triangle(), 0, targets, false);
  REQUIRE(tr.events.size() == 4);
  CHECK(tr.events[0].time == 0.0);
  CHECK(tr.events[0].active_half_edges == 2);
  CHECK(tr.events[1].time == 1.0);
  CHECK(tr.events[1].active_half_edges == 2);
  CHECK(tr.events[1].vertices_discovered == 2);
  CHECK(tr.events[2].time == 3.0);
  CHECK(tr.events[2].vertices_discovered == 3);
  CHECK(tr.events[3].time == 4.0);
  CHECK(tr.events[3].active_half_edges == 0);
  CHECK(tr.time_to_reach(1) == 0.0);
  CHECK(tr.time_to_reach(2) == 0.0);
  CHECK(tr.time_to_reach(4) == kInfinity);
  CHECK_THROWS_AS(tr.time_to_reach(3), std::invalid_argument);
  const std::vector<std::size_t> zero{0};
  CHECK_THROWS_AS(exploration_trace(triangle(), 0, zero), std::invalid_argument);
}

TEST_CASE("exploration replays from distances") {
  Rng rng(2718);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + trial % 8;
    const auto g = oracle::random_small_multigraph(rng, n, 4, trial % 3 != 0);
    const VertexId v = static_cast<VertexId>(trial % n);
    const auto dist = single_source_distances(g, v).dist;
    std::vector<std::size_t> targets;
    for (std::size_t c = 1; c <= 12; ++c) targets.push_back(c);
    const auto tr = exploration_trace(g, v, targets, false);
    REQUIRE(tr.events.front().active_half_edges == g.degree(v));
    for (const auto& ev : tr.events) {
      REQUIRE(ev.active_half_edges == oracle::replay_active(g, dist, ev.time));
      REQUIRE(ev.vertices_discovered == oracle::replay_discovered(dist, ev.time));
    }
    for (std::size_t c : targets) {
      CAPTURE(c);
      REQUIRE(tr.time_to_reach(c) == replay_threshold(g, dist, c));
    }
  }
}

TEST_CASE("threshold times are monotone and vanish up to the source degree") {
  const auto g = regular_graph(5000, 3, 9);
  std::vector<std::size_t> targets;
  for (std::size_t c = 1; c <= 60; ++c) targets.push_back(c);
  for (VertexId v = 0; v < 50; ++v) {
    const auto tr = exploration_trace(g, v, targets);
    for (std::size_t c = 1; c <= g.degree(v); ++c) CHECK(tr.time_to_reach(c) == 0.0);
    CHECK(std::is_sorted(tr.threshold_times.begin(), tr.threshold_times.end()));
    const auto full = exploration_trace(g, v, targets, false);
    CHECK(full.threshold_times == tr.threshold_times);
  }
}

TEST_CASE("maximum exploration time") {
  SUBCASE("small n makes every threshold zero") {
    // ceil(2 log 4) = 3 <= d_min = 3
    const auto g = regular_graph(4, 3, 1);
    const auto m = max_exploration_time(g, 2.0);
    CHECK(m.target == 3);
    CHECK(m.time == 0.0);
    CHECK(m.vertex == 0);
  }
  SUBCASE("matches per-vertex traces") {
    const auto g = regular_graph(300, 3, 4);
    const auto m = max_exploration_time(g, 2.0);
    CHECK(m.target == static_cast<std::size_t>(std::ceil(2.0 * std::log(300.0))));
    double best = 0.0;
    VertexId arg = 0;
    const std::vector<std::size_t> t{m.target};
    for (VertexId v = 0; v < 300; ++v) {
      const double x = exploration_trace(g, v, t).threshold_times[0];
      if (x > best) {
        best = x;
        arg = v;
      }
    }
    CHECK(m.time == best);
    CHECK(m.vertex == arg);
    CHECK(max_exploration_time(g, 2.0).time == m.time);
  }
  CHECK_THROWS_AS(max_exploration_time(triangle(), 0.0), std::invalid_argument);
}

TEST_CASE("bad vertices") {
  const double s = bad_vertex_threshold(1000, 3, 0.5, 1.0);
  CHECK(s == doctest::Approx(0.5 * std::log(1000.0) / 3.0));
  CHECK_THROWS_AS(bad_vertex_threshold(1000, 3, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(bad_vertex_threshold(1000, 3, 0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(bad_vertex_threshold(1000, 3, 0.5, kInfinity), std::invalid_argument);

  const auto g = regular_graph(200, 3, 6);
  const DegreeSequence reg(std::vector<std::uint32_t>(200, 3));
  const double s200 = bad_vertex_threshold(200, 3, 0.5, 1.0);
  // A vertex with three distinct neighbours, none of them itself.
  VertexId target = 0;
  for (VertexId v = 0; v < 200; ++v) {
    std::set<VertexId> nb;
    for (const auto& inc : g.neighbors(v)) nb.insert(inc.neighbor);
    if (nb.size() == 3 && !nb.count(v)) {
      target = v;
      break;
    }
  }
  std::vector<double> light(g.edge_count(), 0.5 * s200);
  CHECK(bad_vertex_count(g.with_weights(light), reg, 0.5, 1.0) == 0);
  std::vector<double> w = light;
  for (EdgeId e = 0; e < g.edge_count(); ++e)
    if (g.edge(e).u == target || g.edge(e).v == target) w[e] = 2.0 * s200;
  CHECK(bad_vertex_count(g.with_weights(w), reg, 0.5, 1.0) == 1);
  const DegreeSequence wrong(std::vector<std::uint32_t>(199, 3));
  CHECK_THROWS_AS(bad_vertex_count(g, wrong, 0.5, 1.0), std::invalid_argument);
}
