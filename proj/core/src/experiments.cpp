#include "fpplab/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "fpplab/branching.hpp"
#include "fpplab/config_graph.hpp"
#include "fpplab/io.hpp"
#include "json.hpp"
#include "parse_util.hpp"

namespace fpplab {

TheoreticalLimits theoretical_limits(const DegreeDistribution& p, const WeightLaw& law) {
  if (!p.condition1_conforming())
    throw std::invalid_argument("degree law has minimum degree " + std::to_string(p.min_degree()) +
                                "; the log n limits need d_min >= 3");
  const auto tail = law.tail_exponent();
  if (!tail.admissible()) {
    const std::string which = tail.classification == TailClass::heavy
                                  ? "c = 0 (heavier than any exponential)"
                                  : "c = inf (bounded or super-exponential tail)";
    throw std::invalid_argument("weight law " + law.to_string() +
                                " violates the exponential-tail hypothesis: " + which +
                                "; diam/log n and flood/log n limits require 0 < c < inf");
  }
  TheoreticalLimits lim{};
  lim.nu = size_biased(p).nu;
  lim.alpha = malthusian_parameter(lim.nu, law);
  lim.c = tail.value;
  lim.min_degree = p.min_degree();
  const double tail_term = 1.0 / (lim.c * lim.min_degree);
  lim.diam_limit = 1.0 / lim.alpha + 2.0 * tail_term;
  lim.flood_limit = 1.0 / lim.alpha + tail_term;
  return lim;
}

// ---------------------------------------------------------------------------
// Configuration

namespace {

bool parse_bool(std::string_view s) {
  s = detail::trim(s);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw std::invalid_argument("expected a boolean, got '" + std::string(s) + "'");
}

std::vector<std::size_t> parse_grid(std::string_view s) {
  std::vector<std::size_t> grid;
  for (auto item : detail::split(s, ',')) {
    item = detail::trim(item);
    if (item.empty()) continue;
    // Accept 1e4-style sizes as long as they are integral.
    const double v = detail::parse_double(item);
    if (!(v >= 0.0) || v != std::floor(v) || v > 4e9)
      throw std::invalid_argument("n_grid entries must be integers, got '" + std::string(item) + "'");
    grid.push_back(static_cast<std::size_t>(v));
  }
  return grid;
}

}  // namespace

ExperimentConfig ExperimentConfig::parse(std::istream& in) {
  ExperimentConfig cfg;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = detail::trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos)
      throw std::invalid_argument("config line " + std::to_string(number) + ": expected key = value");
    const auto key = detail::trim(view.substr(0, eq));
    const auto value = detail::trim(view.substr(eq + 1));
    try {
      if (key == "degree_law") cfg.degree_law = DegreeDistribution::parse(value);
      else if (key == "degree_file") cfg.degree_file = std::string(value);
      else if (key == "weight_law") cfg.weight_law = std::string(value);
      else if (key == "n_grid") cfg.n_grid = parse_grid(value);
      else if (key == "replicas") cfg.replicas = detail::parse_uint(value);
      else if (key == "seed") cfg.seed = detail::parse_uint(value);
      else if (key == "K") cfg.K = detail::parse_double(value);
      else if (key == "epsilon") cfg.epsilon = detail::parse_double(value);
      else if (key == "keep_disconnected") cfg.keep_disconnected = parse_bool(value);
      else if (key == "workers") cfg.workers = static_cast<unsigned>(detail::parse_uint(value));
      else if (key == "output_dir") cfg.output_dir = std::string(value);
      else if (key == "csv") cfg.csv = std::string(value);
      else if (key == "jsonl") cfg.jsonl = std::string(value);
      else if (key == "summary") cfg.summary = std::string(value);
      else if (key == "metadata") cfg.metadata = std::string(value);
      else throw std::invalid_argument("unknown key '" + std::string(key) + "'");
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("config line " + std::to_string(number) + ": " + e.what());
    }
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  auto cfg = parse(in);
  if (!cfg.degree_file.empty()) {
    std::filesystem::path file(cfg.degree_file);
    if (file.is_relative()) file = std::filesystem::path(path).parent_path() / file;
    std::ifstream degrees(file);
    if (!degrees) throw std::runtime_error("cannot open degree file " + file.string());
    cfg.degree_sequence = io::read_degrees_text(degrees);
    cfg.n_grid = {cfg.degree_sequence->size()};
  }
  return cfg;
}

void ExperimentConfig::apply_environment() {
  if (const char* dir = std::getenv("FPPLAB_OUTPUT_DIR"); dir != nullptr && *dir != '\0')
    output_dir = dir;
  if (const char* w = std::getenv("FPPLAB_WORKERS"); w != nullptr && *w != '\0')
    workers = static_cast<unsigned>(detail::parse_uint(w));
}

void ExperimentConfig::validate() const {
  if (degree_law.has_value() == degree_sequence.has_value())
    throw std::invalid_argument("config needs exactly one of degree_law and degree_file");
  if (n_grid.empty()) throw std::invalid_argument("n_grid is empty");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 2) throw std::invalid_argument("n_grid sizes must be at least 2");
    if (i > 0 && n_grid[i] <= n_grid[i - 1])
      throw std::invalid_argument("n_grid must be strictly ascending");
  }
  if (degree_sequence && (n_grid.size() != 1 || n_grid[0] != degree_sequence->size()))
    throw std::invalid_argument("with degree_file, n_grid must equal the sequence length");
  if (replicas < 1) throw std::invalid_argument("replicas must be at least 1");
  if (!(K > 0.0)) throw std::invalid_argument("K must be positive");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1)");
  (void)WeightLaw::parse(weight_law);
}

// ---------------------------------------------------------------------------
// Sweeps

std::string_view to_string(RecordStatus s) noexcept {
  switch (s) {
    case RecordStatus::ok: return "ok";
    case RecordStatus::disconnected: return "disconnected";
    case RecordStatus::failed: return "failed";
  }
  return "unknown";
}

SweepRecord run_replica(const ExperimentConfig& config, std::size_t n, std::size_t replica) {
  const auto started = std::chrono::steady_clock::now();
  SweepRecord r;
  r.n = n;
  r.replica = replica;
  r.seed = derive_seed(config.seed, n, replica);
  try {
    Rng rng(r.seed);
    const auto law = WeightLaw::parse(config.weight_law);
    const DegreeSequence seq = config.degree_sequence
                                   ? *config.degree_sequence
                                   : sample_degree_sequence(*config.degree_law, n, rng);
    const auto g = assign_weights(pair_half_edges(seq, rng), law, rng);

    const auto stats = graph_stats(g);
    r.loops = stats.loop_count;
    r.multi_edges = stats.multi_edge_count;
    r.max_degree = stats.max_degree;
    r.components = stats.component_sizes.size();
    r.largest_component = stats.component_sizes.empty() ? 0 : stats.component_sizes.front();
    r.nu_n = empirical_nu(seq);

    std::uniform_int_distribution<VertexId> pick(0, static_cast<VertexId>(n - 1));
    r.flood_source = pick(rng);
    r.pair_u = pick(rng);
    do r.pair_v = pick(rng);
    while (r.pair_v == r.pair_u);

    r.flood = component_flooding_time(g, r.flood_source);
    r.diam = stats.connected ? weighted_diameter(g) : component_diameter(g, r.flood_source);
    r.status = stats.connected ? RecordStatus::ok : RecordStatus::disconnected;
    const double log_n = std::log(static_cast<double>(n));
    r.diam_over_log_n = r.diam / log_n;
    r.flood_over_log_n = r.flood / log_n;

    const auto tmax = max_exploration_time(g, config.K);
    r.t_target = tmax.target;
    r.t_max = tmax.time;
    r.t_argmax = tmax.vertex;

    const auto balls = two_ball_distance(g, r.pair_u, r.pair_v);
    r.pair_distance = balls.distance;
    r.collision_half_edges_u = balls.half_edges_u;
    r.collision_half_edges_v = balls.half_edges_v;
    const double m = static_cast<double>(seq.total_degree()) / static_cast<double>(n);
    r.collision_scale = std::sqrt(3.0 * m * static_cast<double>(n) * log_n);

    if (!law.is_empirical()) {
      const auto tail = law.tail_exponent();
      if (tail.admissible()) r.bad_vertices = bad_vertex_count(g, seq, config.epsilon, tail.value);
    }
  } catch (const std::exception& e) {
    r.status = RecordStatus::failed;
    r.error = e.what();
  }
  r.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return r;
}

std::vector<SweepRecord> run_sweep(const ExperimentConfig& config, const RecordSink& sink) {
  config.validate();
  std::vector<std::pair<std::size_t, std::size_t>> jobs;
  for (auto n : config.n_grid)
    for (std::size_t r = 0; r < config.replicas; ++r) jobs.emplace_back(n, r);

  std::vector<SweepRecord> records(jobs.size());
  const unsigned workers =
      std::max(1u, std::min<unsigned>(config.workers == 0 ? std::thread::hardware_concurrency()
                                                          : config.workers,
                                      static_cast<unsigned>(jobs.size())));
  if (workers == 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      records[i] = run_replica(config, jobs[i].first, jobs[i].second);
      if (sink) sink(records[i]);
    }
    return records;
  }

  std::mutex mutex;
  std::condition_variable ready;
  std::vector<char> done(jobs.size(), 0);
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < jobs.size();) {
        auto rec = run_replica(config, jobs[i].first, jobs[i].second);
        std::lock_guard lock(mutex);
        records[i] = std::move(rec);
        done[i] = 1;
        ready.notify_all();
      }
    });
  }
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    std::unique_lock lock(mutex);
    ready.wait(lock, [&] { return done[i] != 0; });
    lock.unlock();
    if (sink) sink(records[i]);
  }
  for (auto& th : pool) th.join();
  return records;
}

Moments moments(std::span<const double> values) {
  Moments m;
  if (values.empty()) return m;
  m.min = *std::min_element(values.begin(), values.end());
  m.max = *std::max_element(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  m.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - m.mean) * (v - m.mean);
    m.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return m;
}

std::vector<SummaryRow> summarize(std::span<const SweepRecord> records,
                                  const std::optional<TheoreticalLimits>& limits,
                                  bool include_disconnected) {
  if (records.empty()) throw std::invalid_argument("summarize: no records");
  std::vector<std::size_t> order;
  std::map<std::size_t, std::vector<const SweepRecord*>> by_n;
  for (const auto& r : records) {
    if (!by_n.count(r.n)) order.push_back(r.n);
    by_n[r.n].push_back(&r);
  }

  std::vector<SummaryRow> rows;
  for (auto n : order) {
    SummaryRow row;
    row.n = n;
    std::vector<double> diam, flood, tmax, bad;
    for (const auto* r : by_n[n]) {
      ++row.records;
      if (r->status == RecordStatus::failed) {
        ++row.failed;
        continue;
      }
      if (r->status == RecordStatus::disconnected && !include_disconnected) {
        ++row.discarded;
        continue;
      }
      ++row.used;
      diam.push_back(r->diam_over_log_n);
      flood.push_back(r->flood_over_log_n);
      tmax.push_back(r->t_max);
      if (r->bad_vertices) bad.push_back(static_cast<double>(*r->bad_vertices));
    }
    row.diam_over_log_n = moments(diam);
    row.flood_over_log_n = moments(flood);
    row.mean_t_max = moments(tmax).mean;
    if (!bad.empty()) row.mean_bad_vertices = moments(bad).mean;
    if (limits && row.used > 0) {
      row.diam_ratio = row.diam_over_log_n.mean / limits->diam_limit;
      row.flood_ratio = row.flood_over_log_n.mean / limits->flood_limit;
    }
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Output

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return detail::format_double(v);
}

nlohmann::ordered_json json_num(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

}  // namespace

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> columns = {
      "n", "replica", "seed", "status", "diam", "flood", "diam_over_log_n", "flood_over_log_n",
      "flood_source", "t_target", "t_max", "t_argmax", "pair_u", "pair_v", "pair_distance",
      "collision_half_edges_u", "collision_half_edges_v", "collision_scale", "bad_vertices",
      "loops", "multi_edges", "max_degree", "components", "largest_component", "nu_n", "error"};
  return columns;
}

void write_csv_header(std::ostream& out) {
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
}

void write_csv_row(std::ostream& out, const SweepRecord& r) {
  std::string error = r.error;
  std::replace(error.begin(), error.end(), ',', ';');
  std::replace(error.begin(), error.end(), '\n', ' ');
  out << r.n << ',' << r.replica << ',' << r.seed << ',' << to_string(r.status) << ','
      << num(r.diam) << ',' << num(r.flood) << ',' << num(r.diam_over_log_n) << ','
      << num(r.flood_over_log_n) << ',' << r.flood_source << ',' << r.t_target << ','
      << num(r.t_max) << ',' << r.t_argmax << ',' << r.pair_u << ',' << r.pair_v << ','
      << num(r.pair_distance) << ',' << r.collision_half_edges_u << ','
      << r.collision_half_edges_v << ',' << num(r.collision_scale) << ',';
  if (r.bad_vertices) out << *r.bad_vertices;
  out << ',' << r.loops << ',' << r.multi_edges << ',' << r.max_degree << ',' << r.components
      << ',' << r.largest_component << ',' << num(r.nu_n) << ',' << error << '\n';
}

void write_jsonl_row(std::ostream& out, const SweepRecord& r) {
  nlohmann::ordered_json j;
  j["n"] = r.n;
  j["replica"] = r.replica;
  j["seed"] = r.seed;
  j["status"] = to_string(r.status);
  j["diam"] = json_num(r.diam);
  j["flood"] = json_num(r.flood);
  j["diam_over_log_n"] = json_num(r.diam_over_log_n);
  j["flood_over_log_n"] = json_num(r.flood_over_log_n);
  j["flood_source"] = r.flood_source;
  j["t_target"] = r.t_target;
  j["t_max"] = json_num(r.t_max);
  j["t_argmax"] = r.t_argmax;
  j["pair_u"] = r.pair_u;
  j["pair_v"] = r.pair_v;
  j["pair_distance"] = json_num(r.pair_distance);
  j["collision_half_edges_u"] = r.collision_half_edges_u;
  j["collision_half_edges_v"] = r.collision_half_edges_v;
  j["collision_scale"] = json_num(r.collision_scale);
  j["bad_vertices"] = r.bad_vertices ? nlohmann::ordered_json(*r.bad_vertices) : nullptr;
  j["loops"] = r.loops;
  j["multi_edges"] = r.multi_edges;
  j["max_degree"] = r.max_degree;
  j["components"] = r.components;
  j["largest_component"] = r.largest_component;
  j["nu_n"] = json_num(r.nu_n);
  if (!r.error.empty()) j["error"] = r.error;
  out << j.dump() << '\n';
}

void write_metadata_row(std::ostream& out, const SweepRecord& r) {
  nlohmann::ordered_json j;
  j["n"] = r.n;
  j["replica"] = r.replica;
  j["wall_seconds"] = r.wall_seconds;
  out << j.dump() << '\n';
}

void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows) {
  out << "n,records,used,discarded,failed,diam_mean,diam_sd,diam_min,diam_max,flood_mean,"
         "flood_sd,flood_min,flood_max,diam_ratio,flood_ratio,t_max_mean,bad_vertices_mean\n";
  auto opt = [](const std::optional<double>& v) { return v ? num(*v) : std::string(); };
  for (const auto& r : rows) {
    out << r.n << ',' << r.records << ',' << r.used << ',' << r.discarded << ',' << r.failed
        << ',' << num(r.diam_over_log_n.mean) << ',' << num(r.diam_over_log_n.sd) << ','
        << num(r.diam_over_log_n.min) << ',' << num(r.diam_over_log_n.max) << ','
        << num(r.flood_over_log_n.mean) << ',' << num(r.flood_over_log_n.sd) << ','
        << num(r.flood_over_log_n.min) << ',' << num(r.flood_over_log_n.max) << ','
        << opt(r.diam_ratio) << ',' << opt(r.flood_ratio) << ',' << num(r.mean_t_max) << ','
        << opt(r.mean_bad_vertices) << '\n';
  }
}

}  // namespace fpplab
