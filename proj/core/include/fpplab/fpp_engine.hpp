#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "fpplab/config_graph.hpp"
#include "fpplab/degree_model.hpp"

namespace fpplab {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// First-passage distances from one source. Unreachable vertices hold
/// kInfinity and no predecessor.
struct DistanceMap {
  VertexId source = 0;
  std::vector<double> dist;
  std::vector<std::optional<VertexId>> predecessor;
};

/// Dijkstra from `source`. Heap ties are broken by (distance, vertex id) so
/// results are deterministic even when float sums collide.
DistanceMap single_source_distances(const WeightedMultiGraph& g, VertexId source);

double weighted_distance(const WeightedMultiGraph& g, VertexId u, VertexId v);

/// max_b dist(a, b); kInfinity if some vertex is unreachable from a.
double flooding_time(const WeightedMultiGraph& g, VertexId a);

/// Largest finite distance from a, i.e. the flooding time of a's component.
double component_flooding_time(const WeightedMultiGraph& g, VertexId a);

enum class DiameterAlgorithm {
  /// One Dijkstra sweep from every vertex.
  all_sources,
  /// Sweeps from selected vertices only; every other vertex is discarded
  /// once the triangle inequality bounds its eccentricity by the largest
  /// one seen so far. Same result, far fewer sweeps on random graphs.
  bounded,
};

struct DiameterOptions {
  DiameterAlgorithm algorithm = DiameterAlgorithm::bounded;
  /// Worker threads for all_sources sweeps; 0 means hardware concurrency.
  unsigned workers = 1;
  /// Filled with the number of Dijkstra sweeps performed, when non-null.
  std::size_t* sweeps = nullptr;
};

/// Exact weighted diameter (max eccentricity). kInfinity iff the graph is
/// disconnected.
double weighted_diameter(const WeightedMultiGraph& g, const DiameterOptions& options = {});

/// Largest distance between two vertices of a's component.
double component_diameter(const WeightedMultiGraph& g, VertexId a,
                          const DiameterOptions& options = {});

/// Growth of the exploration ball around a vertex, in time order.
struct ExplorationEvent {
  double time;
  std::size_t active_half_edges;
  std::size_t vertices_discovered;
};

struct ExplorationTrace {
  VertexId source = 0;
  std::vector<ExplorationEvent> events;  // events[0] is the state at time 0
  std::vector<std::size_t> targets;      // sorted, deduplicated
  std::vector<double> threshold_times;   // T_C per entry of `targets`

  /// T_C for a target in `targets`.
  double time_to_reach(std::size_t target) const;
};

/// Explores from v in weighted-distance order. Every half-edge of a
/// discovered vertex is active until its edge is traversed; the first
/// crossing of an edge either discovers a vertex (adding its other
/// half-edges) or closes a cycle (removing both half-edges of the edge).
/// With `stop_at_targets` the walk ends once every target is reached.
ExplorationTrace exploration_trace(const WeightedMultiGraph& g, VertexId v,
                                   std::span<const std::size_t> targets,
                                   bool stop_at_targets = true);

struct ExplorationMax {
  double time = 0.0;
  VertexId vertex = 0;
  std::size_t target = 0;
};

/// max over v of T_{ceil(K log n)}(v), with the smallest maximizing vertex.
ExplorationMax max_exploration_time(const WeightedMultiGraph& g, double K);

struct TwoBallResult {
  double distance = kInfinity;
  /// Half-edges (sum of degrees of settled vertices) in each ball when the
  /// search stops.
  std::uint64_t half_edges_u = 0;
  std::uint64_t half_edges_v = 0;
  std::size_t settled_u = 0;
  std::size_t settled_v = 0;
};

/// Bidirectional Dijkstra, growing the ball whose frontier is closer. The
/// distance is re-accumulated along the found path from u, so it matches
/// single_source_distances bit for bit when the shortest path is unique.
TwoBallResult two_ball_distance(const WeightedMultiGraph& g, VertexId u, VertexId v);

/// The (1 - epsilon) log n / (c d_min) weight threshold for bad vertices.
double bad_vertex_threshold(std::size_t n, std::uint32_t min_degree, double epsilon, double c);

/// Vertices of degree d_min whose incident edge weights all exceed the
/// threshold. A loop counts as two incidences with the same weight.
std::size_t bad_vertex_count(const WeightedMultiGraph& g, const DegreeSequence& seq,
                             double epsilon, double c);

}  // namespace fpplab
