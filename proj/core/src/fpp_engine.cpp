#include "fpplab/fpp_engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <thread>

namespace fpplab {

namespace {

using HeapEntry = std::pair<double, VertexId>;

void heap_push(std::vector<HeapEntry>& heap, double d, VertexId v) {
  heap.emplace_back(d, v);
  std::push_heap(heap.begin(), heap.end(), std::greater<>());
}

HeapEntry heap_pop(std::vector<HeapEntry>& heap) {
  std::pop_heap(heap.begin(), heap.end(), std::greater<>());
  const auto top = heap.back();
  heap.pop_back();
  return top;
}

void check_vertex(const WeightedMultiGraph& g, VertexId v, const char* who) {
  if (v >= g.vertex_count())
    throw std::out_of_range(std::string(who) + ": vertex " + std::to_string(v) + " out of range");
}

void check_weighted(const WeightedMultiGraph& g, const char* who) {
  if (!g.weighted()) throw std::invalid_argument(std::string(who) + ": graph has no weights");
}

// Reusable Dijkstra state for repeated sweeps over one graph.
class Sweeper {
 public:
  explicit Sweeper(const WeightedMultiGraph& g)
      : g_(g), dist_(g.vertex_count(), kInfinity), done_(g.vertex_count(), 0) {}

  // Largest finite distance from s. Afterwards distance(v) is valid for
  // every vertex reached.
  double eccentricity(VertexId s) {
    for (auto v : touched_) {
      dist_[v] = kInfinity;
      done_[v] = 0;
    }
    touched_.clear();
    heap_.clear();

    double far = 0.0;
    dist_[s] = 0.0;
    touched_.push_back(s);
    heap_push(heap_, 0.0, s);
    while (!heap_.empty()) {
      const auto [d, x] = heap_pop(heap_);
      if (done_[x]) continue;
      done_[x] = 1;
      far = d;
      for (const auto& inc : g_.neighbors(x)) {
        const double nd = d + inc.w;
        if (nd < dist_[inc.neighbor]) {
          if (dist_[inc.neighbor] == kInfinity) touched_.push_back(inc.neighbor);
          dist_[inc.neighbor] = nd;
          heap_push(heap_, nd, inc.neighbor);
        }
      }
    }
    return far;
  }

  double distance(VertexId v) const { return dist_[v]; }

 private:
  const WeightedMultiGraph& g_;
  std::vector<double> dist_;
  std::vector<char> done_;
  std::vector<VertexId> touched_;
  std::vector<HeapEntry> heap_;
};

double all_sources_eccentricity(const WeightedMultiGraph& g, std::span<const VertexId> sources,
                                unsigned workers) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(
      std::min<std::size_t>(workers, std::max<std::size_t>(1, sources.size())));
  if (workers == 1) {
    Sweeper sweeper(g);
    double best = 0.0;
    for (auto s : sources) best = std::max(best, sweeper.eccentricity(s));
    return best;
  }
  std::atomic<std::size_t> next{0};
  std::vector<double> partial(workers, 0.0);
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < workers; ++t) {
    pool.emplace_back([&, t] {
      Sweeper sweeper(g);
      for (std::size_t i; (i = next.fetch_add(1)) < sources.size();)
        partial[t] = std::max(partial[t], sweeper.eccentricity(sources[i]));
    });
  }
  for (auto& th : pool) th.join();
  return *std::max_element(partial.begin(), partial.end());
}

// Eccentricity bounding over one connected vertex set. For a swept vertex h
// and any w, ecc(w) <= d(w,h) + ecc(h) and ecc(w) >= max(d(w,h), ecc(h) - d(w,h)).
// A vertex leaves the candidate set once its upper bound cannot beat the best
// eccentricity found. The bound carries a relative margin so float rounding
// in d + ecc never discards a vertex that ties the maximum.
double bounded_eccentricity(const WeightedMultiGraph& g, std::span<const VertexId> members,
                            std::size_t* sweeps) {
  constexpr double kMargin = 1e-9;
  std::vector<VertexId> candidates(members.begin(), members.end());
  std::vector<double> upper(g.vertex_count(), kInfinity);
  std::vector<double> lower(g.vertex_count(), 0.0);
  Sweeper sweeper(g);
  double best = 0.0;
  std::size_t count = 0;
  bool pick_central = false;

  while (!candidates.empty()) {
    // Alternate between the most promising vertex (largest upper bound) and
    // the most central one (smallest lower bound), whose sweep tightens
    // upper bounds for the most neighbours.
    std::size_t pick = 0;
    for (std::size_t i = 1; i < candidates.size(); ++i) {
      const auto c = candidates[i], p = candidates[pick];
      const bool better = pick_central
                              ? (lower[c] < lower[p] || (lower[c] == lower[p] && upper[c] > upper[p]))
                              : (upper[c] > upper[p] || (upper[c] == upper[p] && lower[c] < lower[p]));
      if (better) pick = i;
    }
    pick_central = !pick_central;
    const VertexId h = candidates[pick];
    const double ecc = sweeper.eccentricity(h);
    ++count;
    best = std::max(best, ecc);

    std::size_t kept = 0;
    for (const auto w : candidates) {
      if (w == h) continue;
      const double d = sweeper.distance(w);
      upper[w] = std::min(upper[w], ecc + d);
      lower[w] = std::max(lower[w], std::max(d, ecc - d));
      if (upper[w] * (1.0 + kMargin) >= best) candidates[kept++] = w;
    }
    candidates.resize(kept);
  }
  if (sweeps != nullptr) *sweeps = count;
  return best;
}

double max_eccentricity(const WeightedMultiGraph& g, std::span<const VertexId> sources,
                        const DiameterOptions& options) {
  if (options.algorithm == DiameterAlgorithm::all_sources) {
    if (options.sweeps != nullptr) *options.sweeps = sources.size();
    return all_sources_eccentricity(g, sources, options.workers);
  }
  return bounded_eccentricity(g, sources, options.sweeps);
}

}  // namespace

DistanceMap single_source_distances(const WeightedMultiGraph& g, VertexId source) {
  check_vertex(g, source, "single_source_distances");
  check_weighted(g, "single_source_distances");
  DistanceMap map;
  map.source = source;
  map.dist.assign(g.vertex_count(), kInfinity);
  map.predecessor.assign(g.vertex_count(), std::nullopt);
  std::vector<char> done(g.vertex_count(), 0);
  std::vector<HeapEntry> heap;

  map.dist[source] = 0.0;
  heap_push(heap, 0.0, source);
  while (!heap.empty()) {
    const auto [d, x] = heap_pop(heap);
    if (done[x]) continue;
    done[x] = 1;
    for (const auto& inc : g.neighbors(x)) {
      const double nd = d + inc.w;
      if (nd < map.dist[inc.neighbor]) {
        map.dist[inc.neighbor] = nd;
        map.predecessor[inc.neighbor] = x;
        heap_push(heap, nd, inc.neighbor);
      }
    }
  }
  return map;
}

double weighted_distance(const WeightedMultiGraph& g, VertexId u, VertexId v) {
  check_vertex(g, v, "weighted_distance");
  if (u == v) {
    check_vertex(g, u, "weighted_distance");
    return 0.0;
  }
  return single_source_distances(g, u).dist[v];
}

double flooding_time(const WeightedMultiGraph& g, VertexId a) {
  const auto map = single_source_distances(g, a);
  return *std::max_element(map.dist.begin(), map.dist.end());
}

double component_flooding_time(const WeightedMultiGraph& g, VertexId a) {
  check_vertex(g, a, "component_flooding_time");
  check_weighted(g, "component_flooding_time");
  return Sweeper(g).eccentricity(a);
}

double weighted_diameter(const WeightedMultiGraph& g, const DiameterOptions& options) {
  if (g.vertex_count() == 0) return 0.0;
  check_weighted(g, "weighted_diameter");
  const auto labels = component_labels(g);
  if (std::any_of(labels.begin(), labels.end(), [](auto l) { return l != 0; })) return kInfinity;
  std::vector<VertexId> sources(g.vertex_count());
  for (VertexId v = 0; v < sources.size(); ++v) sources[v] = v;
  return max_eccentricity(g, sources, options);
}

double component_diameter(const WeightedMultiGraph& g, VertexId a, const DiameterOptions& options) {
  check_vertex(g, a, "component_diameter");
  check_weighted(g, "component_diameter");
  const auto labels = component_labels(g);
  std::vector<VertexId> sources;
  for (VertexId v = 0; v < labels.size(); ++v)
    if (labels[v] == labels[a]) sources.push_back(v);
  return max_eccentricity(g, sources, options);
}

// ---------------------------------------------------------------------------
// Exploration

double ExplorationTrace::time_to_reach(std::size_t target) const {
  const auto it = std::lower_bound(targets.begin(), targets.end(), target);
  if (it == targets.end() || *it != target)
    throw std::invalid_argument("time_to_reach: target was not requested");
  return threshold_times[static_cast<std::size_t>(it - targets.begin())];
}

namespace {

struct PendingHalfEdge {
  double time;
  VertexId from;
  EdgeId edge;
  VertexId to;

  bool operator>(const PendingHalfEdge& o) const {
    if (time != o.time) return time > o.time;
    if (from != o.from) return from > o.from;
    return edge > o.edge;
  }
};

// Ball growth around one vertex. Scratch arrays are stamped with a per-run
// epoch so a single Explorer can be reused for every source of a graph.
class Explorer {
 public:
  explicit Explorer(const WeightedMultiGraph& g)
      : g_(g), vertex_stamp_(g.vertex_count(), 0), edge_stamp_(g.edge_count(), 0) {}

  ExplorationTrace run(VertexId v, std::vector<std::size_t> targets, bool stop_at_targets,
                       bool record_events) {
    ++epoch_;
    heap_.clear();

    ExplorationTrace trace;
    trace.source = v;
    trace.targets = std::move(targets);
    trace.threshold_times.assign(trace.targets.size(), kInfinity);
    std::size_t reached = 0;

    std::size_t active = g_.degree(v);
    std::size_t discovered = 1;
    vertex_stamp_[v] = epoch_;
    push_half_edges(v, 0.0, std::numeric_limits<EdgeId>::max());

    auto note = [&](double t) {
      if (record_events) trace.events.push_back({t, active, discovered});
      while (reached < trace.targets.size() && trace.targets[reached] <= active)
        trace.threshold_times[reached++] = t;
    };
    note(0.0);

    while (!heap_.empty()) {
      if (stop_at_targets && reached == trace.targets.size()) break;
      std::pop_heap(heap_.begin(), heap_.end(), std::greater<>());
      const auto h = heap_.back();
      heap_.pop_back();
      if (edge_stamp_[h.edge] == epoch_) continue;  // other half already crossed
      edge_stamp_[h.edge] = epoch_;

      if (vertex_stamp_[h.to] == epoch_) {
        active -= 2;  // cycle or loop closed: both half-edges retire
      } else {
        vertex_stamp_[h.to] = epoch_;
        ++discovered;
        active = active + g_.degree(h.to) - 2;  // -1 matched, +(deg - 1) new
        push_half_edges(h.to, h.time, h.edge);
      }
      note(h.time);
    }
    return trace;
  }

 private:
  void push_half_edges(VertexId x, double t, EdgeId skip) {
    for (const auto& inc : g_.neighbors(x)) {
      if (inc.edge == skip) continue;
      heap_.push_back({t + inc.w, x, inc.edge, inc.neighbor});
      std::push_heap(heap_.begin(), heap_.end(), std::greater<>());
    }
  }

  const WeightedMultiGraph& g_;
  std::vector<std::uint32_t> vertex_stamp_;
  std::vector<std::uint32_t> edge_stamp_;
  std::uint32_t epoch_ = 0;
  std::vector<PendingHalfEdge> heap_;
};

std::vector<std::size_t> normalize_targets(std::span<const std::size_t> targets) {
  std::vector<std::size_t> out(targets.begin(), targets.end());
  if (std::find(out.begin(), out.end(), 0u) != out.end())
    throw std::invalid_argument("exploration targets must be positive");
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

ExplorationTrace exploration_trace(const WeightedMultiGraph& g, VertexId v,
                                   std::span<const std::size_t> targets, bool stop_at_targets) {
  check_vertex(g, v, "exploration_trace");
  check_weighted(g, "exploration_trace");
  return Explorer(g).run(v, normalize_targets(targets), stop_at_targets, true);
}

ExplorationMax max_exploration_time(const WeightedMultiGraph& g, double K) {
  if (!(K > 0.0) || !std::isfinite(K))
    throw std::invalid_argument("max_exploration_time: K must be positive");
  if (g.vertex_count() == 0) return {};
  check_weighted(g, "max_exploration_time");
  const double n = static_cast<double>(g.vertex_count());
  const auto target =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(K * std::log(n))));

  ExplorationMax best;
  best.target = target;
  Explorer explorer(g);
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    if (g.degree(v) >= target) continue;  // T = 0
    const auto trace = explorer.run(v, {target}, true, false);
    if (trace.threshold_times[0] > best.time) {
      best.time = trace.threshold_times[0];
      best.vertex = v;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Two-ball collision

TwoBallResult two_ball_distance(const WeightedMultiGraph& g, VertexId u, VertexId v) {
  check_vertex(g, u, "two_ball_distance");
  check_vertex(g, v, "two_ball_distance");
  check_weighted(g, "two_ball_distance");
  if (u == v) throw std::invalid_argument("two_ball_distance: endpoints must differ");

  struct Side {
    std::vector<double> dist;
    std::vector<EdgeId> via;  // edge to the parent, for path recovery
    std::vector<char> done;
    std::vector<HeapEntry> heap;
    std::uint64_t half_edges = 0;
    std::size_t settled = 0;

    explicit Side(std::size_t n)
        : dist(n, kInfinity), via(n, std::numeric_limits<EdgeId>::max()), done(n, 0) {}

    double top() {
      while (!heap.empty() && done[heap.front().second]) {
        std::pop_heap(heap.begin(), heap.end(), std::greater<>());
        heap.pop_back();
      }
      return heap.empty() ? kInfinity : heap.front().first;
    }
  };

  const auto n = g.vertex_count();
  Side fwd(n), bwd(n);
  fwd.dist[u] = 0.0;
  heap_push(fwd.heap, 0.0, u);
  bwd.dist[v] = 0.0;
  heap_push(bwd.heap, 0.0, v);

  double best = kInfinity;
  // Meeting edge, oriented so that a is on u's side and b on v's side.
  VertexId meet_a = u, meet_b = v;
  EdgeId meet_edge = std::numeric_limits<EdgeId>::max();

  while (true) {
    const double tf = fwd.top();
    const double tb = bwd.top();
    if (tf == kInfinity || tb == kInfinity || tf + tb >= best) break;

    const bool forward = tf <= tb;
    Side& side = forward ? fwd : bwd;
    const Side& other = forward ? bwd : fwd;
    const auto [d, x] = heap_pop(side.heap);
    side.done[x] = 1;
    side.half_edges += g.degree(x);
    ++side.settled;
    for (const auto& inc : g.neighbors(x)) {
      const double nd = d + inc.w;
      if (nd < side.dist[inc.neighbor]) {
        side.dist[inc.neighbor] = nd;
        side.via[inc.neighbor] = inc.edge;
        heap_push(side.heap, nd, inc.neighbor);
      }
      if (other.dist[inc.neighbor] != kInfinity) {
        const double through = nd + other.dist[inc.neighbor];
        if (through < best) {
          best = through;
          meet_edge = inc.edge;
          meet_a = forward ? x : inc.neighbor;
          meet_b = forward ? inc.neighbor : x;
        }
      }
    }
  }

  TwoBallResult result;
  result.half_edges_u = fwd.half_edges;
  result.half_edges_v = bwd.half_edges;
  result.settled_u = fwd.settled;
  result.settled_v = bwd.settled;
  if (best == kInfinity) return result;

  auto step_back = [&](const Side& side, VertexId x) {
    const auto& e = g.edge(side.via[x]);
    return e.u == x ? e.v : e.u;
  };
  std::vector<EdgeId> path;
  for (VertexId x = meet_a; x != u; x = step_back(fwd, x)) path.push_back(fwd.via[x]);
  std::reverse(path.begin(), path.end());
  path.push_back(meet_edge);
  for (VertexId x = meet_b; x != v; x = step_back(bwd, x)) path.push_back(bwd.via[x]);

  double total = 0.0;
  for (auto e : path) total += g.edge(e).w;
  result.distance = total;
  return result;
}

// ---------------------------------------------------------------------------
// Bad vertices

double bad_vertex_threshold(std::size_t n, std::uint32_t min_degree, double epsilon, double c) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("bad-vertex epsilon must lie in (0, 1)");
  if (!(c > 0.0) || !std::isfinite(c))
    throw std::invalid_argument("bad-vertex tail exponent c must be finite and positive");
  if (min_degree == 0) throw std::invalid_argument("bad-vertex threshold needs d_min > 0");
  return (1.0 - epsilon) / (c * min_degree) * std::log(static_cast<double>(n));
}

std::size_t bad_vertex_count(const WeightedMultiGraph& g, const DegreeSequence& seq,
                             double epsilon, double c) {
  if (seq.size() != g.vertex_count())
    throw std::invalid_argument("bad_vertex_count: degree sequence does not match the graph");
  if (seq.empty()) return 0;
  check_weighted(g, "bad_vertex_count");
  const auto d_min = seq.min_degree();
  const double threshold = bad_vertex_threshold(seq.size(), d_min, epsilon, c);
  std::size_t count = 0;
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    if (g.degree(v) != d_min) continue;
    const auto inc = g.neighbors(v);
    if (std::all_of(inc.begin(), inc.end(), [&](const Incidence& i) { return i.w > threshold; }))
      ++count;
  }
  return count;
}

}  // namespace fpplab
