#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fpplab/branching.hpp"
#include "fpplab/config_graph.hpp"
#include "fpplab/degree_model.hpp"
#include "fpplab/experiments.hpp"
#include "fpplab/fpp_engine.hpp"
#include "fpplab/io.hpp"
#include "fpplab/weights.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace fpplab;

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kUsage = 2 };

json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

void emit_error(const std::string& kind, const std::string& message, int code) {
  json err;
  err["error"] = kind;
  err["message"] = message;
  err["exit_code"] = code;
  std::cerr << err.dump() << '\n';
}

std::ofstream open_out(const fs::path& path, bool binary = false) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_in(const fs::path& path, bool binary = false) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

// Output goes to the named file, or stdout for "" and "-".
template <typename Fn>
void with_output(const std::string& path, bool binary, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    std::cout.flush();
    return;
  }
  auto out = open_out(path, binary);
  fn(out);
}

WeightedMultiGraph load_graph(const std::string& path, const std::string& format) {
  const bool binary = format == "binary";
  auto in = open_in(path, binary);
  return binary ? io::read_graph_binary(in) : io::read_graph_text(in);
}

struct GraphSource {
  std::string degree_law;
  std::string degree_file;
  std::size_t n = 0;
  std::string weights = "exp:1";
  std::uint64_t seed = 1;
};

void add_graph_source(CLI::App* cmd, GraphSource& src) {
  auto* law = cmd->add_option("--degrees", src.degree_law, "Degree law k:p,... sampled i.i.d.");
  auto* file = cmd->add_option("--degree-file", src.degree_file, "Degree sequence, one per line");
  law->excludes(file);
  cmd->add_option("-n,--n", src.n, "Number of vertices (with --degrees)");
  cmd->add_option("--weights", src.weights, "Edge-weight law")->capture_default_str();
  cmd->add_option("--seed", src.seed, "Random seed")->capture_default_str();
}

DegreeSequence degrees_for(const GraphSource& src, Rng& rng) {
  if (!src.degree_file.empty()) {
    auto in = open_in(src.degree_file);
    return io::read_degrees_text(in);
  }
  if (src.degree_law.empty()) throw std::invalid_argument("give --degrees or --degree-file");
  if (src.n < 2) throw std::invalid_argument("--n must be at least 2");
  return sample_degree_sequence(DegreeDistribution::parse(src.degree_law), src.n, rng);
}

// Same draw order as a sweep replica: degrees, pairing, weights.
WeightedMultiGraph build_graph(const GraphSource& src, DegreeSequence* seq_out = nullptr) {
  Rng rng(src.seed);
  const auto seq = degrees_for(src, rng);
  const auto law = WeightLaw::parse(src.weights);
  auto g = assign_weights(pair_half_edges(seq, rng), law, rng);
  if (seq_out) *seq_out = seq;
  return g;
}

json limits_json(const TheoreticalLimits& lim) {
  json j;
  j["nu"] = lim.nu;
  j["alpha"] = lim.alpha;
  j["c"] = lim.c;
  j["min_degree"] = lim.min_degree;
  j["diam_limit"] = lim.diam_limit;
  j["flood_limit"] = lim.flood_limit;
  return j;
}

json stats_json(const GraphStats& s, std::size_t n, std::size_t m) {
  json j;
  j["vertices"] = n;
  j["edges"] = m;
  j["loops"] = s.loop_count;
  j["simple_edges"] = s.simple_edge_count;
  j["multi_edges"] = s.multi_edge_count;
  j["max_degree"] = s.max_degree;
  j["connected"] = s.connected;
  j["components"] = s.component_sizes.size();
  j["largest_component"] = s.component_sizes.empty() ? 0 : s.component_sizes.front();
  return j;
}

std::vector<std::size_t> parse_targets(const std::string& text) {
  std::vector<std::size_t> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!item.empty()) {
      std::size_t v = 0;
      const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
      if (ec != std::errc{} || ptr != item.data() + item.size())
        throw std::invalid_argument("bad target '" + item + "'");
      out.push_back(v);
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (out.empty()) throw std::invalid_argument("no exploration targets given");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"First-passage percolation on the configuration model"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "fpplab 0.1.0");

  // limits
  std::string lim_degrees = "3:1", lim_weights = "exp:1";
  auto* limits = app.add_subcommand("limits", "Print the limits of diam/log n and flood/log n");
  limits->add_option("--degrees", lim_degrees, "Degree law k:p,...")->capture_default_str();
  limits->add_option("--weights", lim_weights, "Edge-weight law")->capture_default_str();

  // sweep
  std::string sweep_config, sweep_output_dir;
  std::optional<unsigned> sweep_workers;
  bool sweep_quiet = false;
  auto* sweep = app.add_subcommand("sweep", "Run the experiment described by a config file");
  sweep->add_option("config", sweep_config, "Config file (key = value lines)")->required();
  sweep->add_option("--output-dir", sweep_output_dir, "Overrides output_dir");
  sweep->add_option("--workers", sweep_workers, "Overrides workers");
  sweep->add_flag("-q,--quiet", sweep_quiet, "No per-record progress on stderr");

  // graph
  GraphSource graph_src;
  std::string graph_output, graph_format = "text", graph_stats_path;
  auto* graph = app.add_subcommand("graph", "Generate one weighted configuration-model graph");
  add_graph_source(graph, graph_src);
  graph->add_option("-o,--output", graph_output, "Graph file (default stdout)");
  graph->add_option("--format", graph_format, "text or binary")
      ->check(CLI::IsMember({"text", "binary"}))
      ->capture_default_str();
  graph->add_option("--stats", graph_stats_path, "Also write graph statistics as JSON");

  // dist
  std::string dist_graph, dist_format = "text", dist_output;
  VertexId dist_source = 0;
  std::optional<VertexId> dist_target;
  auto* dist = app.add_subcommand("dist", "Single-source first-passage distances");
  dist->add_option("graph", dist_graph, "Graph file")->required();
  dist->add_option("--format", dist_format, "text or binary")
      ->check(CLI::IsMember({"text", "binary"}))
      ->capture_default_str();
  dist->add_option("-s,--source", dist_source, "Source vertex")->capture_default_str();
  dist->add_option("-t,--target", dist_target, "Print only the distance to this vertex");
  dist->add_option("-o,--output", dist_output, "Output file (default stdout)");

  // branch
  std::string br_degrees = "3:1", br_weights = "exp:1", br_output;
  std::optional<double> br_horizon;
  std::optional<std::uint64_t> br_cap, br_initial;
  std::uint64_t br_seed = 1;
  auto* branch = app.add_subcommand("branch", "Simulate the age-dependent branching process");
  branch->add_option("--degrees", br_degrees, "Degree law; offspring follow its size-biased law")
      ->capture_default_str();
  branch->add_option("--weights", br_weights, "Lifetime law")->capture_default_str();
  auto* horizon = branch->add_option("--horizon", br_horizon, "Stop at this time");
  auto* cap = branch->add_option("--cap", br_cap, "Stop when the population reaches this size");
  horizon->excludes(cap);
  branch->add_option("--initial", br_initial, "Initial population (default: minimum degree)");
  branch->add_option("--seed", br_seed, "Random seed")->capture_default_str();
  branch->add_option("-o,--output", br_output, "Trajectory file (time population lines)");

  // tail
  std::string tail_samples, tail_law, tail_model = "log_corrected";
  std::size_t tail_count = 100'000;
  std::uint64_t tail_seed = 1;
  std::vector<double> tail_grid;
  std::size_t tail_boot = 200;
  auto* tail = app.add_subcommand("tail", "Estimate the tail exponent of a weight sample");
  auto* from_file = tail->add_option("--samples", tail_samples, "File with one sample per line");
  auto* from_law = tail->add_option("--law", tail_law, "Draw the sample from this law instead");
  from_file->excludes(from_law);
  tail->add_option("--count", tail_count, "Sample size with --law")->capture_default_str();
  tail->add_option("--seed", tail_seed, "Seed with --law")->capture_default_str();
  tail->add_option("--model", tail_model, "linear or log_corrected")
      ->check(CLI::IsMember({"linear", "log_corrected"}))
      ->capture_default_str();
  tail->add_option("--grid", tail_grid, "Quantile levels lo,hi,points")->delimiter(',')->expected(3);
  tail->add_option("--bootstrap", tail_boot, "Bootstrap replicates")->capture_default_str();

  // trace
  std::string tr_graph, tr_format = "text", tr_targets = "1", tr_output;
  VertexId tr_source = 0;
  bool tr_full = false;
  auto* trace = app.add_subcommand("trace", "Exploration process from one vertex");
  trace->add_option("graph", tr_graph, "Graph file")->required();
  trace->add_option("--format", tr_format, "text or binary")
      ->check(CLI::IsMember({"text", "binary"}))
      ->capture_default_str();
  trace->add_option("-s,--source", tr_source, "Source vertex")->capture_default_str();
  trace->add_option("--targets", tr_targets, "Active half-edge targets C, comma separated")
      ->capture_default_str();
  trace->add_flag("--full", tr_full, "Run until the component is exhausted");
  trace->add_option("-o,--output", tr_output, "Event file (time active discovered lines)");

  // sample
  std::string sm_law = "exp:1", sm_output;
  std::size_t sm_count = 1000;
  std::uint64_t sm_seed = 1;
  auto* sample = app.add_subcommand("sample", "Draw weights from a law");
  sample->add_option("--law", sm_law, "Weight law")->capture_default_str();
  sample->add_option("--count", sm_count, "Number of draws")->capture_default_str();
  sample->add_option("--seed", sm_seed, "Random seed")->capture_default_str();
  sample->add_option("-o,--output", sm_output, "Output file (default stdout)");

  // degrees
  std::string dg_law = "3:1", dg_output, dg_check;
  std::size_t dg_n = 1000;
  std::uint64_t dg_seed = 1;
  double dg_delta = 1.0;
  auto* degrees = app.add_subcommand("degrees", "Sample a degree sequence or check one");
  degrees->add_option("--law", dg_law, "Degree law k:p,...")->capture_default_str();
  degrees->add_option("-n,--n", dg_n, "Number of vertices")->capture_default_str();
  degrees->add_option("--seed", dg_seed, "Random seed")->capture_default_str();
  degrees->add_option("--check", dg_check, "Report regularity statistics for this degree file");
  degrees->add_option("--delta", dg_delta, "Moment exponent 2 + delta")->capture_default_str();
  degrees->add_option("-o,--output", dg_output, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    emit_error("usage", e.what(), kUsage);
    return kUsage;
  }

  try {
    if (limits->parsed()) {
      const auto lim = theoretical_limits(DegreeDistribution::parse(lim_degrees),
                                          WeightLaw::parse(lim_weights));
      std::cout << limits_json(lim).dump(2) << '\n';
    } else if (sweep->parsed()) {
      auto cfg = ExperimentConfig::load(sweep_config);
      cfg.apply_environment();
      if (!sweep_output_dir.empty()) cfg.output_dir = sweep_output_dir;
      if (sweep_workers) cfg.workers = *sweep_workers;
      cfg.validate();
      const fs::path dir(cfg.output_dir);
      auto csv = open_out(dir / cfg.csv);
      auto jsonl = open_out(dir / cfg.jsonl);
      auto meta = open_out(dir / cfg.metadata);
      write_csv_header(csv);
      const auto records = run_sweep(cfg, [&](const SweepRecord& r) {
        write_csv_row(csv, r);
        write_jsonl_row(jsonl, r);
        write_metadata_row(meta, r);
        if (!sweep_quiet)
          std::cerr << "n=" << r.n << " replica=" << r.replica << ' ' << to_string(r.status)
                    << " diam/log n=" << r.diam_over_log_n << '\n';
      });
      std::optional<TheoreticalLimits> lim;
      if (cfg.degree_law) {
        try {
          lim = theoretical_limits(*cfg.degree_law, WeightLaw::parse(cfg.weight_law));
        } catch (const std::invalid_argument&) {
        }
      }
      const auto rows = summarize(records, lim, cfg.keep_disconnected);
      auto summary = open_out(dir / cfg.summary);
      write_summary_csv(summary, rows);
      std::size_t failed = 0;
      for (const auto& r : records) failed += r.status == RecordStatus::failed;
      json done;
      done["records"] = records.size();
      done["failed"] = failed;
      done["csv"] = (dir / cfg.csv).string();
      done["jsonl"] = (dir / cfg.jsonl).string();
      done["summary"] = (dir / cfg.summary).string();
      done["metadata"] = (dir / cfg.metadata).string();
      if (lim) done["limits"] = limits_json(*lim);
      std::cout << done.dump(2) << '\n';
      if (failed > 0) {
        emit_error("records_failed", std::to_string(failed) + " sweep records failed", kFailure);
        return kFailure;
      }
    } else if (graph->parsed()) {
      const auto g = build_graph(graph_src);
      with_output(graph_output, graph_format == "binary", [&](std::ostream& out) {
        if (graph_format == "binary") io::write_graph_binary(out, g);
        else io::write_graph_text(out, g);
      });
      if (!graph_stats_path.empty()) {
        auto out = open_out(graph_stats_path);
        out << stats_json(graph_stats(g), g.vertex_count(), g.edge_count()).dump(2) << '\n';
      }
    } else if (dist->parsed()) {
      const auto g = load_graph(dist_graph, dist_format);
      const auto map = single_source_distances(g, dist_source);
      with_output(dist_output, false, [&](std::ostream& out) {
        if (dist_target) {
          if (*dist_target >= g.vertex_count()) throw std::out_of_range("target vertex out of range");
          const double d = map.dist[*dist_target];
          if (std::isinf(d)) out << "inf\n";
          else {
            char buf[32];
            const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, d);
            out << std::string(buf, ptr) << '\n';
          }
        } else {
          io::write_distances(out, map);
        }
      });
    } else if (branch->parsed()) {
      const auto p = DegreeDistribution::parse(br_degrees);
      const auto law = WeightLaw::parse(br_weights);
      const BranchingSpec spec(size_biased(p), law, br_initial.value_or(p.min_degree()));
      StopRule stop = SizeCap{100'000};
      if (br_horizon) stop = TimeHorizon{*br_horizon};
      if (br_cap) stop = SizeCap{*br_cap};
      Rng rng(br_seed);
      const auto traj = simulate_cmj(spec, stop, rng);
      if (!br_output.empty()) {
        auto out = open_out(br_output);
        io::write_trajectory(out, traj);
      }
      json j;
      j["nu"] = spec.nu();
      j["alpha"] = spec.alpha();
      j["c_prime"] = spec.c_prime();
      j["initial_population"] = spec.initial_population();
      j["events"] = traj.events.size() - 1;
      j["final_time"] = traj.events.back().time;
      j["final_population"] = traj.events.back().population;
      j["terminal_reason"] = traj.terminal_reason == TerminalReason::size_cap      ? "size_cap"
                             : traj.terminal_reason == TerminalReason::extinction ? "extinction"
                                                                                  : "time_horizon";
      try {
        j["growth_rate"] = estimate_growth_rate(traj);
      } catch (const std::invalid_argument&) {
        j["growth_rate"] = nullptr;
      }
      std::cout << j.dump(2) << '\n';
    } else if (tail->parsed()) {
      std::vector<double> x;
      std::string source;
      if (!tail_samples.empty()) {
        auto in = open_in(tail_samples);
        x = io::read_samples(in);
        source = tail_samples;
      } else {
        if (tail_law.empty()) throw std::invalid_argument("give --samples or --law");
        const auto law = WeightLaw::parse(tail_law);
        Rng rng(tail_seed);
        x.resize(tail_count);
        for (auto& v : x) v = law.sample(rng);
        source = law.to_string();
      }
      TailFitOptions opts;
      opts.model = tail_model == "linear" ? TailModel::linear : TailModel::log_corrected;
      opts.bootstrap_replicates = tail_boot;
      const auto est =
          tail_grid.empty()
              ? estimate_tail_exponent(x, opts)
              : estimate_tail_exponent(
                    x, quantile_grid(x, tail_grid[0], tail_grid[1],
                                     static_cast<std::size_t>(tail_grid[2])),
                    opts);
      json j;
      j["source"] = source;
      j["samples"] = x.size();
      j["model"] = tail_model;
      j["c"] = number(est.value);
      j["lower"] = number(est.lower);
      j["upper"] = number(est.upper);
      j["classification"] = to_string(est.classification);
      j["shape_index"] = est.shape_index;
      j["points_used"] = est.points_used;
      std::cout << j.dump(2) << '\n';
    } else if (trace->parsed()) {
      const auto g = load_graph(tr_graph, tr_format);
      const auto targets = parse_targets(tr_targets);
      const auto tr = exploration_trace(g, tr_source, targets, !tr_full);
      if (!tr_output.empty()) {
        auto out = open_out(tr_output);
        io::write_trace(out, tr);
      }
      json j;
      j["source"] = tr.source;
      j["events"] = tr.events.size();
      json times = json::array();
      for (std::size_t i = 0; i < tr.targets.size(); ++i) {
        json t;
        t["target"] = tr.targets[i];
        t["time"] = number(tr.threshold_times[i]);
        times.push_back(t);
      }
      j["thresholds"] = times;
      std::cout << j.dump(2) << '\n';
    } else if (sample->parsed()) {
      const auto law = WeightLaw::parse(sm_law);
      Rng rng(sm_seed);
      std::vector<double> x(sm_count);
      for (auto& v : x) v = law.sample(rng);
      with_output(sm_output, false, [&](std::ostream& out) { io::write_samples(out, x); });
    } else if (degrees->parsed()) {
      if (!dg_check.empty()) {
        auto in = open_in(dg_check);
        const auto seq = io::read_degrees_text(in);
        const auto target = DegreeDistribution::parse(dg_law);
        const auto r = validate_condition1(seq, &target, dg_delta);
        json j;
        j["n"] = r.n;
        j["total_degree"] = r.total_degree;
        j["parity_ok"] = r.parity_ok;
        j["min_degree"] = r.min_degree;
        j["min_degree_ok"] = r.min_degree_ok;
        j["max_degree"] = r.max_degree;
        j["delta"] = r.delta;
        j["moment"] = number(r.moment);
        j["max_degree_ratio"] = r.max_degree_ratio ? number(*r.max_degree_ratio) : json(nullptr);
        j["tv_distance"] = r.tv_distance ? number(*r.tv_distance) : json(nullptr);
        j["nu_n"] = number(empirical_nu(seq));
        j["ok"] = r.ok();
        std::cout << j.dump(2) << '\n';
        if (!r.ok()) {
          emit_error("condition_violated", "degree sequence fails the parity or minimum-degree check",
                     kFailure);
          return kFailure;
        }
      } else {
        Rng rng(dg_seed);
        const auto seq = sample_degree_sequence(DegreeDistribution::parse(dg_law), dg_n, rng);
        with_output(dg_output, false, [&](std::ostream& out) { io::write_degrees_text(out, seq); });
      }
    }
  } catch (const std::invalid_argument& e) {
    emit_error("invalid_argument", e.what(), kFailure);
    return kFailure;
  } catch (const std::out_of_range& e) {
    emit_error("out_of_range", e.what(), kFailure);
    return kFailure;
  } catch (const std::exception& e) {
    emit_error("runtime_error", e.what(), kFailure);
    return kFailure;
  }
  return kOk;
}
