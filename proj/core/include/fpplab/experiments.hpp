#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fpplab/degree_model.hpp"
#include "fpplab/fpp_engine.hpp"
#include "fpplab/weights.hpp"

namespace fpplab {

/// Limits of diam / log n and flood / log n for regular-enough degrees and
/// exponential-tail weights, with the quantities they are built from.
struct TheoreticalLimits {
  double diam_limit;
  double flood_limit;
  double alpha;
  double c;
  double nu;
  std::uint32_t min_degree;
};

/// 1/alpha + 2/(c d_min) and 1/alpha + 1/(c d_min). Rejects weight laws whose
/// tail exponent is 0 or infinite and degree laws with d_min < 3.
TheoreticalLimits theoretical_limits(const DegreeDistribution& p, const WeightLaw& law);

/// Flat `key = value` configuration; `#` starts a comment.
///
///   degree_law  = 3:1.0          (or degree_file = path, one degree per line)
///   weight_law  = exp:1.0
///   n_grid      = 1000,10000
///   replicas    = 20
///   seed        = 1
///   K           = 2
///   epsilon     = 0.5
///   keep_disconnected = false
///   workers     = 1
///   output_dir  = .
///   csv / jsonl / summary / metadata = file names inside output_dir
struct ExperimentConfig {
  std::optional<DegreeDistribution> degree_law;
  std::optional<DegreeSequence> degree_sequence;
  std::string degree_file;
  std::string weight_law = "exp:1";
  std::vector<std::size_t> n_grid;
  std::size_t replicas = 1;
  std::uint64_t seed = 1;
  double K = 2.0;
  double epsilon = 0.5;
  bool keep_disconnected = false;
  unsigned workers = 1;
  std::string output_dir = ".";
  std::string csv = "sweep.csv";
  std::string jsonl = "sweep.jsonl";
  std::string summary = "summary.csv";
  std::string metadata = "sweep.meta.jsonl";

  static ExperimentConfig parse(std::istream& in);
  static ExperimentConfig load(const std::string& path);

  /// FPPLAB_OUTPUT_DIR and FPPLAB_WORKERS, when set, replace the file values.
  void apply_environment();
  void validate() const;
};

enum class RecordStatus { ok, disconnected, failed };

std::string_view to_string(RecordStatus s) noexcept;

struct SweepRecord {
  std::size_t n = 0;
  std::size_t replica = 0;
  std::uint64_t seed = 0;
  RecordStatus status = RecordStatus::ok;
  std::string error;

  double diam = 0.0;   // over the flooding source's component
  double flood = 0.0;  // from the flooding source
  double diam_over_log_n = 0.0;
  double flood_over_log_n = 0.0;
  VertexId flood_source = 0;

  std::size_t t_target = 0;  // ceil(K log n)
  double t_max = 0.0;
  VertexId t_argmax = 0;

  VertexId pair_u = 0;
  VertexId pair_v = 0;
  double pair_distance = 0.0;
  std::uint64_t collision_half_edges_u = 0;
  std::uint64_t collision_half_edges_v = 0;
  double collision_scale = 0.0;  // sqrt(3 m n log n) with m = l_n / n

  std::optional<std::size_t> bad_vertices;
  std::size_t loops = 0;
  std::size_t multi_edges = 0;
  std::uint32_t max_degree = 0;
  std::size_t components = 0;
  std::size_t largest_component = 0;
  double nu_n = 0.0;

  /// Not part of the CSV/JSON payload; written to the metadata file.
  double wall_seconds = 0.0;
};

using RecordSink = std::function<void(const SweepRecord&)>;

/// One replica: sample degrees, pair, weight, then measure. Never throws for
/// per-record problems; those come back as `failed` records.
SweepRecord run_replica(const ExperimentConfig& config, std::size_t n, std::size_t replica);

/// All (n, replica) records in grid order. `sink` sees each record as soon
/// as it and every earlier record are done.
std::vector<SweepRecord> run_sweep(const ExperimentConfig& config, const RecordSink& sink = {});

struct Moments {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation, 0 for a single value
  double min = 0.0;
  double max = 0.0;
};

Moments moments(std::span<const double> values);

struct SummaryRow {
  std::size_t n = 0;
  std::size_t records = 0;
  std::size_t used = 0;
  std::size_t discarded = 0;  // disconnected samples left out
  std::size_t failed = 0;
  Moments diam_over_log_n;
  Moments flood_over_log_n;
  std::optional<double> diam_ratio;   // mean / limit
  std::optional<double> flood_ratio;
  double mean_t_max = 0.0;
  std::optional<double> mean_bad_vertices;
};

std::vector<SummaryRow> summarize(std::span<const SweepRecord> records,
                                  const std::optional<TheoreticalLimits>& limits = std::nullopt,
                                  bool include_disconnected = false);

/// Column order of the CSV payload.
const std::vector<std::string>& csv_columns();
void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const SweepRecord& r);
void write_jsonl_row(std::ostream& out, const SweepRecord& r);
void write_metadata_row(std::ostream& out, const SweepRecord& r);
void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows);

}  // namespace fpplab
