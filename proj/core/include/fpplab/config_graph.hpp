#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "fpplab/degree_model.hpp"
#include "fpplab/rng.hpp"
#include "fpplab/weights.hpp"

namespace fpplab {

using VertexId = std::uint32_t;
using EdgeId = std::uint32_t;

struct Edge {
  VertexId u;
  VertexId v;  // u == v for a loop
  double w;    // NaN until weights are assigned
};

/// One end of an edge as seen from a vertex.
struct Incidence {
  VertexId neighbor;
  EdgeId edge;
  double w;
};

/// A multigraph on vertices 0..n-1 with loops and parallel edges kept.
/// Adjacency is stored CSR-style; a loop appears twice in its vertex's list,
/// so list length equals degree. Immutable once built.
class WeightedMultiGraph {
 public:
  WeightedMultiGraph() = default;
  /// Edge ids follow the order of `edges`.
  WeightedMultiGraph(std::size_t n, std::vector<Edge> edges);

  std::size_t vertex_count() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  std::uint64_t total_degree() const noexcept { return 2 * static_cast<std::uint64_t>(edges_.size()); }

  std::span<const Edge> edges() const noexcept { return edges_; }
  const Edge& edge(EdgeId e) const noexcept { return edges_[e]; }
  std::span<const Incidence> neighbors(VertexId v) const noexcept {
    return {incidences_.data() + offsets_[v], incidences_.data() + offsets_[v + 1]};
  }
  std::uint32_t degree(VertexId v) const noexcept { return offsets_[v + 1] - offsets_[v]; }

  /// True when every edge carries a positive weight.
  bool weighted() const noexcept { return weighted_; }

  /// Copy with edge weights replaced (one per edge, in edge-id order).
  WeightedMultiGraph with_weights(std::span<const double> weights) const;

 private:
  std::vector<Edge> edges_;
  std::vector<std::uint32_t> offsets_;
  std::vector<Incidence> incidences_;
  bool weighted_ = false;
};

struct GraphStats {
  std::size_t loop_count = 0;
  std::size_t simple_edge_count = 0;  // distinct unordered non-loop pairs
  std::size_t multi_edge_count = 0;   // parallel copies beyond the first
  std::uint32_t max_degree = 0;
  bool connected = false;
  std::vector<std::size_t> component_sizes;  // descending
};

/// Uniform matching of the l_n half-edges: shuffle the half-edge array and
/// pair consecutive entries. Endpoints of each edge are stored with u <= v.
WeightedMultiGraph pair_half_edges(const DegreeSequence& seq, Rng& rng);

/// One independent draw from `law` per edge, in edge-id order.
WeightedMultiGraph assign_weights(const WeightedMultiGraph& g, const WeightLaw& law, Rng& rng);

GraphStats graph_stats(const WeightedMultiGraph& g);

/// Component label of every vertex (labels in order of smallest member).
std::vector<std::uint32_t> component_labels(const WeightedMultiGraph& g);

}  // namespace fpplab
