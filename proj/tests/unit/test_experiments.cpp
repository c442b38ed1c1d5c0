#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "fpplab/experiments.hpp"
#include "json.hpp"

using namespace fpplab;

namespace {

ExperimentConfig small_config(std::size_t n, std::size_t replicas, std::uint64_t seed = 5) {
  ExperimentConfig cfg;
  cfg.degree_law = DegreeDistribution::parse("3:1");
  cfg.n_grid = {n};
  cfg.replicas = replicas;
  cfg.seed = seed;
  return cfg;
}

std::string csv_payload(const std::vector<SweepRecord>& records) {
  std::ostringstream out;
  write_csv_header(out);
  for (const auto& r : records) write_csv_row(out, r);
  return out.str();
}

}  // namespace

TEST_CASE("theoretical limits") {
  SUBCASE("3-regular, exp(1)") {
    const auto lim = theoretical_limits(DegreeDistribution::parse("3:1"), WeightLaw::exponential(1.0));
    CHECK(lim.nu == 2.0);
    CHECK(lim.alpha == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(lim.c == 1.0);
    CHECK(lim.min_degree == 3);
    CHECK(lim.diam_limit == doctest::Approx(5.0 / 3.0).epsilon(1e-12));
    CHECK(lim.flood_limit == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  }
  SUBCASE("3-regular, exp(2)") {
    const auto lim = theoretical_limits(DegreeDistribution::parse("3:1"), WeightLaw::exponential(2.0));
    CHECK(lim.alpha == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(lim.c == 2.0);
    CHECK(lim.diam_limit == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
  }
  SUBCASE("3-regular, gamma(2,1)") {
    const auto lim = theoretical_limits(DegreeDistribution::parse("3:1"), WeightLaw::gamma(2.0, 1.0));
    CHECK(lim.alpha == doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-12));
    CHECK(lim.diam_limit == doctest::Approx(1.0 / (std::sqrt(2.0) - 1.0) + 2.0 / 3.0).epsilon(1e-12));
  }
  SUBCASE("hypothesis gates") {
    const auto p = DegreeDistribution::parse("3:1");
    CHECK_THROWS_WITH_AS(theoretical_limits(p, WeightLaw::lomax(2.0, 1.0)),
                         doctest::Contains("exponential-tail hypothesis"), std::invalid_argument);
    CHECK_THROWS_AS(theoretical_limits(p, WeightLaw::uniform(0.0, 1.0)), std::invalid_argument);
    CHECK_THROWS(theoretical_limits(p, WeightLaw::empirical({1.0, 2.0})));
    CHECK_THROWS_AS(theoretical_limits(DegreeDistribution::parse("2:0.5,3:0.5"),
                                       WeightLaw::exponential(1.0)),
                    std::invalid_argument);
  }
}

TEST_CASE("regular exponential limits match the closed form") {
  for (std::uint32_t d : {3u, 4u, 5u, 6u, 10u}) {
    for (double lambda : {0.25, 0.5, 1.0, 2.0, 7.5}) {
      const auto lim = theoretical_limits(DegreeDistribution({{d, 1.0}}), WeightLaw::exponential(lambda));
      const double a = 1.0 / (lambda * (d - 2.0));
      CHECK(std::abs(lim.diam_limit - (a + 2.0 / (lambda * d))) < 1e-10);
      CHECK(std::abs(lim.flood_limit - (a + 1.0 / (lambda * d))) < 1e-10);
    }
  }
}

TEST_CASE("config parsing") {
  std::istringstream in(
      "# sweep\n"
      "degree_law = 3:0.5,4:0.5\n"
      "weight_law = gamma:2,1   # lifetime\n"
      "n_grid = 1e3, 2000,3e4\n"
      "replicas = 4\n"
      "seed = 77\n"
      "K = 3\n"
      "epsilon = 0.25\n"
      "keep_disconnected = yes\n"
      "workers = 2\n"
      "output_dir = out\n"
      "csv = a.csv\n");
  const auto cfg = ExperimentConfig::parse(in);
  CHECK(cfg.degree_law->mean() == doctest::Approx(3.5));
  CHECK(cfg.weight_law == "gamma:2,1");
  CHECK(cfg.n_grid == std::vector<std::size_t>{1000, 2000, 30000});
  CHECK(cfg.replicas == 4);
  CHECK(cfg.seed == 77);
  CHECK(cfg.K == 3.0);
  CHECK(cfg.epsilon == 0.25);
  CHECK(cfg.keep_disconnected);
  CHECK(cfg.workers == 2);
  CHECK(cfg.output_dir == "out");
  CHECK(cfg.csv == "a.csv");
  CHECK(cfg.jsonl == "sweep.jsonl");
  CHECK_NOTHROW(cfg.validate());

  std::istringstream unknown("colour = blue\n");
  CHECK_THROWS_WITH_AS(ExperimentConfig::parse(unknown), doctest::Contains("line 1"), std::invalid_argument);
  std::istringstream malformed("replicas\n");
  CHECK_THROWS_AS(ExperimentConfig::parse(malformed), std::invalid_argument);
  std::istringstream fractional("n_grid = 1.5e2, 10.5\n");
  CHECK_THROWS_AS(ExperimentConfig::parse(fractional), std::invalid_argument);
}

TEST_CASE("config validation") {
  auto cfg = small_config(100, 1);
  CHECK_NOTHROW(cfg.validate());
  auto bad = cfg;
  bad.n_grid = {100, 50};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.degree_law.reset();
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.epsilon = 1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.replicas = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.weight_law = "cauchy:1";
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("config file with a degree file and environment overrides") {
  const auto dir = std::filesystem::temp_directory_path() / "fpplab_config_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream deg(dir / "degrees.txt");
    for (int i = 0; i < 50; ++i) deg << (i % 2 ? 3 : 5) << '\n';
    std::ofstream cfg(dir / "run.cfg");
    cfg << "degree_file = degrees.txt\nreplicas = 2\n";
  }
  auto cfg = ExperimentConfig::load((dir / "run.cfg").string());
  REQUIRE(cfg.degree_sequence.has_value());
  CHECK(cfg.degree_sequence->size() == 50);
  CHECK(cfg.n_grid == std::vector<std::size_t>{50});
  CHECK_NOTHROW(cfg.validate());

  setenv("FPPLAB_OUTPUT_DIR", "/tmp/elsewhere", 1);
  setenv("FPPLAB_WORKERS", "3", 1);
  cfg.apply_environment();
  unsetenv("FPPLAB_OUTPUT_DIR");
  unsetenv("FPPLAB_WORKERS");
  CHECK(cfg.output_dir == "/tmp/elsewhere");
  CHECK(cfg.workers == 3);

  const auto records = run_sweep(cfg);
  REQUIRE(records.size() == 2);
  CHECK(records[0].n == 50);
  CHECK(records[0].max_degree == 5);
  CHECK_THROWS_AS(ExperimentConfig::load((dir / "missing.cfg").string()), std::runtime_error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("sweep determinism") {
  auto cfg = small_config(100, 2);
  const auto a = run_sweep(cfg);
  const auto b = run_sweep(cfg);
  REQUIRE(a.size() == 2);
  CHECK(a[0].replica == 0);
  CHECK(a[1].replica == 1);
  CHECK(a[0].seed == derive_seed(5, 100, 0));
  CHECK(csv_payload(a) == csv_payload(b));

  cfg.workers = 3;
  cfg.n_grid = {100, 300};
  cfg.replicas = 4;
  std::vector<std::pair<std::size_t, std::size_t>> order;
  const auto parallel = run_sweep(cfg, [&](const SweepRecord& r) { order.emplace_back(r.n, r.replica); });
  cfg.workers = 1;
  const auto serial = run_sweep(cfg);
  CHECK(csv_payload(parallel) == csv_payload(serial));
  REQUIRE(order.size() == 8);
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(order[i].first == (i < 4 ? 100u : 300u));
    CHECK(order[i].second == i % 4);
  }

  // Extending the grid leaves earlier records unchanged.
  cfg.n_grid = {300};
  const auto alone = run_sweep(cfg);
  for (std::size_t i = 0; i < 4; ++i) CHECK(alone[i].diam == serial[4 + i].diam);
}

TEST_CASE("per-record invariants") {
  auto cfg = small_config(400, 6, 11);
  cfg.weight_law = "gamma:2,1";
  for (const auto& r : run_sweep(cfg)) {
    REQUIRE(r.status == RecordStatus::ok);
    CHECK(r.flood <= r.diam);
    CHECK(r.diam <= 2.0 * r.flood);
    CHECK(std::isfinite(r.diam_over_log_n));
    CHECK(r.diam_over_log_n == doctest::Approx(r.diam / std::log(400.0)));
    CHECK(r.flood_over_log_n == doctest::Approx(r.flood / std::log(400.0)));
    CHECK(r.t_target == static_cast<std::size_t>(std::ceil(2.0 * std::log(400.0))));
    CHECK(r.pair_u != r.pair_v);
    CHECK(r.collision_scale == doctest::Approx(std::sqrt(3.0 * 3.0 * 400.0 * std::log(400.0))));
    CHECK(r.bad_vertices.has_value());
    CHECK(r.nu_n == 2.0);
    CHECK(r.components == 1);
    CHECK(r.largest_component == 400);
  }
}

TEST_CASE("disconnected and failed records") {
  auto cfg = small_config(200, 10, 3);
  cfg.degree_law = DegreeDistribution::parse("1:0.5,2:0.5");
  std::size_t disconnected = 0;
  for (const auto& r : run_sweep(cfg)) {
    if (r.status == RecordStatus::disconnected) {
      ++disconnected;
      CHECK(r.components > 1);
      CHECK(std::isfinite(r.diam));
    }
  }
  CHECK(disconnected > 0);

  auto heavy = small_config(100, 1);
  heavy.weight_law = "lomax:2,1";
  const auto r = run_sweep(heavy).front();
  CHECK(r.status == RecordStatus::ok);
  CHECK_FALSE(r.bad_vertices.has_value());
}

TEST_CASE("summaries") {
  SweepRecord one;
  one.n = 10;
  one.diam_over_log_n = 1.5;
  one.flood_over_log_n = 1.0;
  const std::vector<SweepRecord> single{one};
  const auto s = summarize(single);
  REQUIRE(s.size() == 1);
  CHECK(s[0].diam_over_log_n.mean == 1.5);
  CHECK(s[0].diam_over_log_n.sd == 0.0);

  auto two = single;
  two.push_back(one);
  two[0].diam_over_log_n = 1.0;
  two[1].diam_over_log_n = 3.0;
  const auto lim = theoretical_limits(DegreeDistribution::parse("3:1"), WeightLaw::exponential(1.0));
  const auto t = summarize(two, lim);
  CHECK(t[0].diam_over_log_n.mean == 2.0);
  CHECK(t[0].diam_over_log_n.sd == doctest::Approx(std::sqrt(2.0)));
  CHECK(*t[0].diam_ratio == doctest::Approx(2.0 / lim.diam_limit));

  two[1].status = RecordStatus::disconnected;
  auto u = summarize(two);
  CHECK(u[0].used == 1);
  CHECK(u[0].discarded == 1);
  u = summarize(two, std::nullopt, true);
  CHECK(u[0].used == 2);
  CHECK_THROWS_AS(summarize(std::vector<SweepRecord>{}), std::invalid_argument);

  const std::vector<double> values{1.0, 2.0, 4.0};
  const auto m = moments(values);
  CHECK(m.min == 1.0);
  CHECK(m.max == 4.0);
  CHECK(m.mean == doctest::Approx(7.0 / 3.0));
}

TEST_CASE("output formats") {
  auto cfg = small_config(60, 1);
  const auto records = run_sweep(cfg);
  std::ostringstream csv;
  write_csv_header(csv);
  write_csv_row(csv, records[0]);
  std::istringstream lines(csv.str());
  std::string header, row;
  std::getline(lines, header);
  std::getline(lines, row);
  const auto& cols = csv_columns();
  CHECK(std::count(header.begin(), header.end(), ',') + 1 == static_cast<long>(cols.size()));
  CHECK(std::count(row.begin(), row.end(), ',') + 1 == static_cast<long>(cols.size()));
  CHECK(header.rfind("n,replica,seed,status", 0) == 0);
  CHECK(header.find("wall_seconds") == std::string::npos);

  std::ostringstream json;
  write_jsonl_row(json, records[0]);
  const auto parsed = nlohmann::json::parse(json.str());
  CHECK(parsed["n"] == 60);
  CHECK(parsed["status"] == "ok");
  CHECK(parsed["diam"].get<double>() == records[0].diam);
  CHECK_FALSE(parsed.contains("wall_seconds"));

  std::ostringstream meta;
  write_metadata_row(meta, records[0]);
  CHECK(nlohmann::json::parse(meta.str()).contains("wall_seconds"));

  std::ostringstream summary;
  write_summary_csv(summary, summarize(records));
  CHECK(summary.str().rfind("n,", 0) == 0);
}
