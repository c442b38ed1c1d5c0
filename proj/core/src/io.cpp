#include "fpplab/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include "parse_util.hpp"

namespace fpplab::io {

namespace {

using detail::format_double;

std::string format_weight(double w) {
  if (std::isnan(w)) return "nan";
  if (std::isinf(w)) return w > 0 ? "inf" : "-inf";
  return format_double(w);
}

double parse_weight(std::string_view s) {
  s = detail::trim(s);
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  return detail::parse_double(s);
}

// Non-empty lines with '#' comments stripped.
template <class F>
void for_each_line(std::istream& in, F&& f) {
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = detail::trim(view);
    if (view.empty()) continue;
    try {
      f(view);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("line " + std::to_string(number) + ": " + e.what());
    }
  }
}

std::vector<std::string_view> fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const auto start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

template <class T>
void put(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T)))
    throw std::runtime_error("unexpected end of binary input");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace

void write_degrees_text(std::ostream& out, const DegreeSequence& seq) {
  for (auto d : seq.degrees()) out << d << '\n';
}

DegreeSequence read_degrees_text(std::istream& in) {
  std::vector<std::uint32_t> degrees;
  for_each_line(in, [&](std::string_view line) {
    const auto d = detail::parse_uint(line);
    if (d > std::numeric_limits<std::uint32_t>::max())
      throw std::invalid_argument("degree too large");
    degrees.push_back(static_cast<std::uint32_t>(d));
  });
  return DegreeSequence(std::move(degrees));
}

void write_degrees_binary(std::ostream& out, const DegreeSequence& seq) {
  put<std::uint64_t>(out, seq.size());
  for (auto d : seq.degrees()) put<std::uint32_t>(out, d);
}

DegreeSequence read_degrees_binary(std::istream& in) {
  const auto n = get<std::uint64_t>(in);
  std::vector<std::uint32_t> degrees;
  degrees.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(n, 1u << 24)));
  for (std::uint64_t i = 0; i < n; ++i) degrees.push_back(get<std::uint32_t>(in));
  return DegreeSequence(std::move(degrees));
}

void write_distribution(std::ostream& out, const DegreeDistribution& p) {
  for (const auto& m : p.support()) out << m.k << '\t' << format_double(m.p) << '\n';
}

DegreeDistribution read_distribution(std::istream& in) {
  std::vector<DegreeDistribution::Mass> masses;
  for_each_line(in, [&](std::string_view line) {
    const auto f = fields(line);
    if (f.size() != 2) throw std::invalid_argument("expected 'k<TAB>p'");
    masses.push_back({static_cast<std::uint32_t>(detail::parse_uint(f[0])), detail::parse_double(f[1])});
  });
  return DegreeDistribution(std::move(masses));
}

void write_graph_text(std::ostream& out, const WeightedMultiGraph& g) {
  out << g.vertex_count() << ' ' << g.total_degree() << '\n';
  for (const auto& e : g.edges()) out << e.u << ' ' << e.v << ' ' << format_weight(e.w) << '\n';
}

WeightedMultiGraph read_graph_text(std::istream& in) {
  bool header = false;
  std::uint64_t n = 0, total = 0;
  std::vector<Edge> edges;
  for_each_line(in, [&](std::string_view line) {
    const auto f = fields(line);
    if (!header) {
      if (f.size() != 2) throw std::invalid_argument("expected header 'n l_n'");
      n = detail::parse_uint(f[0]);
      total = detail::parse_uint(f[1]);
      header = true;
      return;
    }
    if (f.size() != 3) throw std::invalid_argument("expected 'u v w'");
    edges.push_back({static_cast<VertexId>(detail::parse_uint(f[0])),
                     static_cast<VertexId>(detail::parse_uint(f[1])), parse_weight(f[2])});
  });
  if (!header) throw std::invalid_argument("graph file has no header");
  if (total != 2 * edges.size())
    throw std::invalid_argument("header l_n = " + std::to_string(total) + " but file has " +
                                std::to_string(edges.size()) + " edges");
  return WeightedMultiGraph(static_cast<std::size_t>(n), std::move(edges));
}

void write_graph_binary(std::ostream& out, const WeightedMultiGraph& g) {
  put<std::uint32_t>(out, static_cast<std::uint32_t>(g.vertex_count()));
  put<std::uint64_t>(out, g.total_degree());
  for (const auto& e : g.edges()) {
    put<std::uint32_t>(out, e.u);
    put<std::uint32_t>(out, e.v);
    put<double>(out, e.w);
  }
}

WeightedMultiGraph read_graph_binary(std::istream& in) {
  const auto n = get<std::uint32_t>(in);
  const auto total = get<std::uint64_t>(in);
  if (total % 2 != 0) throw std::invalid_argument("binary graph has odd total degree");
  std::vector<Edge> edges(total / 2);
  for (auto& e : edges) {
    e.u = get<std::uint32_t>(in);
    e.v = get<std::uint32_t>(in);
    e.w = get<double>(in);
  }
  return WeightedMultiGraph(n, std::move(edges));
}

void write_distances(std::ostream& out, const DistanceMap& map) {
  for (std::size_t v = 0; v < map.dist.size(); ++v) {
    out << v << ' ' << format_weight(map.dist[v]) << ' ';
    if (map.predecessor[v])
      out << *map.predecessor[v];
    else
      out << '-';
    out << '\n';
  }
}

void write_trace(std::ostream& out, const ExplorationTrace& trace) {
  for (const auto& e : trace.events)
    out << format_double(e.time) << ' ' << e.active_half_edges << ' ' << e.vertices_discovered
        << '\n';
}

void write_trajectory(std::ostream& out, const PopulationTrajectory& traj) {
  for (const auto& e : traj.events) out << format_double(e.time) << ' ' << e.population << '\n';
}

void write_samples(std::ostream& out, std::span<const double> values) {
  for (double v : values) out << format_weight(v) << '\n';
}

std::vector<double> read_samples(std::istream& in) {
  std::vector<double> values;
  for_each_line(in, [&](std::string_view line) { values.push_back(parse_weight(line)); });
  return values;
}

}  // namespace fpplab::io
