#include "fpplab/config_graph.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace fpplab {

WeightedMultiGraph::WeightedMultiGraph(std::size_t n, std::vector<Edge> edges)
    : edges_(std::move(edges)) {
  if (n > std::numeric_limits<VertexId>::max())
    throw std::invalid_argument("graph too large for 32-bit vertex ids");
  if (edges_.size() > std::numeric_limits<EdgeId>::max())
    throw std::invalid_argument("graph too large for 32-bit edge ids");

  offsets_.assign(n + 1, 0);
  weighted_ = true;
  for (const auto& e : edges_) {
    if (e.u >= n || e.v >= n) throw std::invalid_argument("edge endpoint out of range");
    if (!(e.w > 0.0 && std::isfinite(e.w))) weighted_ = false;
    ++offsets_[e.u + 1];
    ++offsets_[e.v + 1];
  }
  for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] += offsets_[i];

  incidences_.resize(offsets_[n]);
  std::vector<std::uint32_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (EdgeId id = 0; id < edges_.size(); ++id) {
    const auto& e = edges_[id];
    incidences_[cursor[e.u]++] = {e.v, id, e.w};
    incidences_[cursor[e.v]++] = {e.u, id, e.w};
  }
}

WeightedMultiGraph WeightedMultiGraph::with_weights(std::span<const double> weights) const {
  if (weights.size() != edges_.size())
    throw std::invalid_argument("with_weights: need exactly one weight per edge");
  WeightedMultiGraph g = *this;
  g.weighted_ = true;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] > 0.0 && std::isfinite(weights[i])))
      throw std::invalid_argument("edge weights must be positive and finite");
    g.edges_[i].w = weights[i];
  }
  for (auto& inc : g.incidences_) inc.w = weights[inc.edge];
  return g;
}

WeightedMultiGraph pair_half_edges(const DegreeSequence& seq, Rng& rng) {
  if (!seq.has_even_total())
    throw std::invalid_argument("pair_half_edges: total degree " +
                                std::to_string(seq.total_degree()) + " is odd");
  std::vector<VertexId> stubs;
  stubs.reserve(seq.total_degree());
  for (VertexId v = 0; v < seq.size(); ++v) stubs.insert(stubs.end(), seq[v], v);
  std::shuffle(stubs.begin(), stubs.end(), rng);

  constexpr double unset = std::numeric_limits<double>::quiet_NaN();
  std::vector<Edge> edges;
  edges.reserve(stubs.size() / 2);
  for (std::size_t i = 0; i < stubs.size(); i += 2) {
    const auto [a, b] = std::minmax(stubs[i], stubs[i + 1]);
    edges.push_back({a, b, unset});
  }
  return WeightedMultiGraph(seq.size(), std::move(edges));
}

WeightedMultiGraph assign_weights(const WeightedMultiGraph& g, const WeightLaw& law, Rng& rng) {
  if (g.edge_count() > 0 && g.weighted())
    throw std::invalid_argument("assign_weights: graph already carries weights");
  std::vector<double> weights(g.edge_count());
  for (auto& w : weights) w = law.sample(rng);
  return g.with_weights(weights);
}

std::vector<std::uint32_t> component_labels(const WeightedMultiGraph& g) {
  constexpr auto none = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> label(g.vertex_count(), none);
  std::vector<VertexId> stack;
  std::uint32_t next = 0;
  for (VertexId s = 0; s < g.vertex_count(); ++s) {
    if (label[s] != none) continue;
    label[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      const auto v = stack.back();
      stack.pop_back();
      for (const auto& inc : g.neighbors(v)) {
        if (label[inc.neighbor] == none) {
          label[inc.neighbor] = next;
          stack.push_back(inc.neighbor);
        }
      }
    }
    ++next;
  }
  return label;
}

GraphStats graph_stats(const WeightedMultiGraph& g) {
  GraphStats stats;
  std::unordered_map<std::uint64_t, std::uint32_t> pair_counts;
  pair_counts.reserve(g.edge_count());
  for (const auto& e : g.edges()) {
    if (e.u == e.v) {
      ++stats.loop_count;
      continue;
    }
    const auto [a, b] = std::minmax(e.u, e.v);
    const auto key = (static_cast<std::uint64_t>(a) << 32) | b;
    if (pair_counts[key]++ == 0)
      ++stats.simple_edge_count;
    else
      ++stats.multi_edge_count;
  }
  for (VertexId v = 0; v < g.vertex_count(); ++v)
    stats.max_degree = std::max(stats.max_degree, g.degree(v));

  const auto labels = component_labels(g);
  if (!labels.empty()) {
    const auto count = *std::max_element(labels.begin(), labels.end()) + 1;
    stats.component_sizes.assign(count, 0);
    for (auto l : labels) ++stats.component_sizes[l];
    std::sort(stats.component_sizes.begin(), stats.component_sizes.end(), std::greater<>());
  }
  stats.connected = stats.component_sizes.size() <= 1;
  return stats;
}

}  // namespace fpplab
