#pragma once

#include <iosfwd>
#include <span>

#include "fpplab/branching.hpp"
#include "fpplab/config_graph.hpp"
#include "fpplab/degree_model.hpp"
#include "fpplab/fpp_engine.hpp"

// Text and binary formats. Floats are written in shortest round-trip form,
// so text output reads back bit-exactly. Binary formats are little-endian.
namespace fpplab::io {

/// One degree per line.
void write_degrees_text(std::ostream& out, const DegreeSequence& seq);
DegreeSequence read_degrees_text(std::istream& in);

/// uint64 count followed by that many uint32 degrees.
void write_degrees_binary(std::ostream& out, const DegreeSequence& seq);
DegreeSequence read_degrees_binary(std::istream& in);

/// `k<TAB>p` lines.
void write_distribution(std::ostream& out, const DegreeDistribution& p);
DegreeDistribution read_distribution(std::istream& in);

/// Header `n l_n`, then one `u v w` line per edge in edge-id order.
/// Unweighted graphs write `nan` weights.
void write_graph_text(std::ostream& out, const WeightedMultiGraph& g);
WeightedMultiGraph read_graph_text(std::istream& in);

/// uint32 n, uint64 l_n, then per edge uint32 u, uint32 v, float64 w.
void write_graph_binary(std::ostream& out, const WeightedMultiGraph& g);
WeightedMultiGraph read_graph_binary(std::istream& in);

/// `v dist predecessor` lines; unreachable is `inf`, no predecessor is `-`.
void write_distances(std::ostream& out, const DistanceMap& map);

/// `time active_count discovered` lines.
void write_trace(std::ostream& out, const ExplorationTrace& trace);

/// `time population` lines.
void write_trajectory(std::ostream& out, const PopulationTrajectory& traj);

/// One value per line.
void write_samples(std::ostream& out, std::span<const double> values);
std::vector<double> read_samples(std::istream& in);

}  // namespace fpplab::io
