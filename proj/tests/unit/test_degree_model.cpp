#include <cmath>
#include <map>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "fpplab/degree_model.hpp"

using namespace fpplab;

namespace {

double mass(const SizeBiasedLaw& q, std::uint32_t k) {
  for (const auto& m : q.support)
    if (m.k == k) return m.q;
  return 0.0;
}

double total_mass(const SizeBiasedLaw& q) {
  double s = 0.0;
  for (const auto& m : q.support) s += m.q;
  return s;
}

// Random finite-support law with support inside [1, 12].
DegreeDistribution random_distribution(Rng& rng) {
  std::uniform_int_distribution<int> size(1, 6);
  std::uniform_int_distribution<std::uint32_t> degree(1, 12);
  std::map<std::uint32_t, double> raw;
  const int count = size(rng);
  for (int i = 0; i < count; ++i) raw[degree(rng)] += uniform01(rng) + 0.01;
  double total = 0.0;
  for (const auto& [k, w] : raw) total += w;
  std::vector<DegreeDistribution::Mass> masses;
  double acc = 0.0;
  for (auto it = raw.begin(); it != raw.end(); ++it) {
    const double p = std::next(it) == raw.end() ? 1.0 - acc : it->second / total;
    acc += p;
    masses.push_back({it->first, p});
  }
  return DegreeDistribution(masses);
}

}  // namespace

TEST_CASE("degree distribution parsing and validation") {
  const auto p = DegreeDistribution::parse("3:0.5, 4:0.5");
  CHECK(p.support().size() == 2);
  CHECK(p.mean() == doctest::Approx(3.5));
  CHECK(p.min_degree() == 3);
  CHECK(p.max_degree() == 4);
  CHECK(p.probability(4) == 0.5);
  CHECK(p.probability(7) == 0.0);
  CHECK(p.condition1_conforming());
  CHECK(DegreeDistribution::parse(p.to_string()).mean() == p.mean());

  CHECK_FALSE(DegreeDistribution::parse("2:1").condition1_conforming());
  CHECK_THROWS_AS(DegreeDistribution::parse("3:0.5,4:0.4"), std::invalid_argument);
  CHECK_THROWS_AS(DegreeDistribution::parse("3:0.5,3:0.5"), std::invalid_argument);
  CHECK_THROWS_AS(DegreeDistribution::parse("0:1"), std::invalid_argument);
  CHECK_THROWS_AS(DegreeDistribution::parse("3-1"), std::invalid_argument);
  CHECK_THROWS_AS(DegreeDistribution::parse(""), std::invalid_argument);
}

TEST_CASE("condition 1 report on small sequences") {
  SUBCASE("regular degree 3") {
    const auto r = validate_condition1(DegreeSequence({3, 3, 3, 3}));
    CHECK(r.parity_ok);
    CHECK(r.total_degree == 12);
    CHECK(r.min_degree_ok);
    CHECK(r.moment == doctest::Approx(27.0));
    CHECK(r.ok());
  }
  SUBCASE("odd total") {
    const auto r = validate_condition1(DegreeSequence({3, 3, 3}));
    CHECK_FALSE(r.parity_ok);
    CHECK(r.total_degree == 9);
    CHECK_FALSE(r.ok());
  }
  SUBCASE("minimum degree below three") {
    const auto r = validate_condition1(DegreeSequence({2, 3, 3, 4}));
    CHECK(r.parity_ok);
    CHECK_FALSE(r.min_degree_ok);
    CHECK(r.min_degree == 2);
    CHECK_FALSE(r.ok());
  }
  SUBCASE("maximum degree ratio and distance to a target") {
    const auto target = DegreeDistribution::parse("3:0.5,4:0.5");
    const auto r = validate_condition1(DegreeSequence({3, 3, 3, 4}), &target, 2.0);
    REQUIRE(r.max_degree_ratio.has_value());
    CHECK(*r.max_degree_ratio == doctest::Approx(4.0 / std::sqrt(4.0 / std::log(4.0))));
    REQUIRE(r.tv_distance.has_value());
    CHECK(*r.tv_distance == doctest::Approx(0.25));
    CHECK(r.moment == doctest::Approx((3 * 81.0 + 256.0) / 4.0));
  }
  SUBCASE("single vertex has no ratio") {
    CHECK_FALSE(validate_condition1(DegreeSequence({4})).max_degree_ratio.has_value());
  }
  CHECK_THROWS_AS(validate_condition1(DegreeSequence{}), std::invalid_argument);
  CHECK_THROWS_AS(validate_condition1(DegreeSequence({3, 3}), nullptr, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(DegreeSequence({3, 0, 3}), std::invalid_argument);
}

TEST_CASE("size-biased law") {
  SUBCASE("regular") {
    const auto q = size_biased(DegreeDistribution::parse("3:1"));
    CHECK(q.support.size() == 1);
    CHECK(mass(q, 2) == 1.0);
    CHECK(q.nu == 2.0);
  }
  SUBCASE("two-point law") {
    const auto q = size_biased(DegreeDistribution::parse("3:0.5,4:0.5"));
    CHECK(mass(q, 2) == doctest::Approx(3.0 / 7.0).epsilon(1e-14));
    CHECK(mass(q, 3) == doctest::Approx(4.0 / 7.0).epsilon(1e-14));
    CHECK(q.nu == doctest::Approx(18.0 / 7.0).epsilon(1e-14));
  }
  SUBCASE("uneven masses") {
    // (k+1) p_{k+1} / m with m = 3(0.2) + 5(0.8) = 4.6.
    const auto q = size_biased(DegreeDistribution::parse("3:0.2,5:0.8"));
    CHECK(mass(q, 2) == doctest::Approx(0.6 / 4.6).epsilon(1e-14));
    CHECK(mass(q, 4) == doctest::Approx(4.0 / 4.6).epsilon(1e-14));
    CHECK(mass(q, 3) == 0.0);
    CHECK(q.nu == doctest::Approx(2 * 0.6 / 4.6 + 4 * 4.0 / 4.6).epsilon(1e-14));
  }
  SUBCASE("degree-one mass becomes zero offspring") {
    const auto q = size_biased(DegreeDistribution::parse("1:0.5,3:0.5"));
    CHECK(mass(q, 0) == doctest::Approx(0.25));
    CHECK(q.min_offspring() == 0);
  }
}

TEST_CASE("size-biased law sums to one and has nu >= d_min - 1") {
  Rng rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    const auto p = random_distribution(rng);
    const auto q = size_biased(p);
    CHECK(std::abs(total_mass(q) - 1.0) <= 1e-12);
    CHECK(q.nu >= static_cast<double>(p.min_degree()) - 1.0 - 1e-12);
  }
}

TEST_CASE("empirical size-biased law") {
  SUBCASE("regular sequence") {
    const auto q = empirical_size_biased(DegreeSequence({3, 3, 3, 3}));
    CHECK(mass(q, 2) == 1.0);
    CHECK(q.nu == 2.0);
  }
  SUBCASE("two vertices") {
    const auto q = empirical_size_biased(DegreeSequence({3, 4}));
    CHECK(mass(q, 2) == doctest::Approx(3.0 / 7.0).epsilon(1e-14));
    CHECK(mass(q, 3) == doctest::Approx(4.0 / 7.0).epsilon(1e-14));
  }
  SUBCASE("consistency with the limit law at n = 1e5") {
    Rng rng(2024);
    const auto p = DegreeDistribution::parse("3:0.5,4:0.5");
    const auto seq = sample_degree_sequence(p, 100'000, rng);
    CHECK(std::abs(empirical_nu(seq) - 18.0 / 7.0) < 0.02);
  }
}

TEST_CASE("empirical nu equals the integer moment route exactly") {
  Rng rng(5);
  std::uniform_int_distribution<std::uint32_t> deg(1, 40);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::uint32_t> d(1 + trial * 7);
    for (auto& x : d) x = deg(rng);
    const DegreeSequence seq(d);
    std::uint64_t s1 = 0, s2 = 0;
    for (auto x : d) {
      s1 += x;
      s2 += static_cast<std::uint64_t>(x) * x;
    }
    const double direct = static_cast<double>(s2 - s1) / static_cast<double>(s1);
    CHECK(empirical_size_biased(seq).nu == direct);
    CHECK(empirical_nu(seq) == direct);
  }
}

TEST_CASE("empirical size-biased law approaches the limit in total variation") {
  const auto p = DegreeDistribution::parse("3:0.3,4:0.3,5:0.2,7:0.2");
  const auto q = size_biased(p);
  int close = 0;
  const int seeds = 40;
  for (int s = 0; s < seeds; ++s) {
    Rng rng(derive_seed(99, 100'000, s));
    const auto qn = empirical_size_biased(sample_degree_sequence(p, 100'000, rng));
    double tv = 0.0;
    for (std::uint32_t k = 0; k <= 10; ++k) tv += std::abs(mass(q, k) - mass(qn, k));
    if (tv / 2.0 < 0.01) ++close;
  }
  CHECK(close == seeds);
}

TEST_CASE("degree sampling") {
  SUBCASE("degenerate law") {
    Rng rng(1);
    CHECK(sample_degree_sequence(DegreeDistribution::parse("3:1"), 4, rng) ==
          DegreeSequence({3, 3, 3, 3}));
  }
  SUBCASE("forced parity repair") {
    Rng rng(1);
    CHECK(sample_degree_sequence(DegreeDistribution::parse("3:1"), 5, rng) ==
          DegreeSequence({3, 3, 3, 3, 4}));
  }
  SUBCASE("fraction of threes") {
    Rng rng(77);
    const auto seq = sample_degree_sequence(DegreeDistribution::parse("3:0.5,4:0.5"), 10'000, rng);
    std::size_t threes = 0;
    for (auto d : seq.degrees()) threes += d == 3;
    const double frac = static_cast<double>(threes) / 10'000.0;
    CHECK(frac >= 0.48);
    CHECK(frac <= 0.52);
  }
  SUBCASE("same seed, same sequence") {
    const auto p = DegreeDistribution::parse("3:0.2,5:0.8");
    Rng a(9), b(9);
    CHECK(sample_degree_sequence(p, 1000, a) == sample_degree_sequence(p, 1000, b));
  }
  Rng rng(1);
  CHECK_THROWS_AS(sample_degree_sequence(DegreeDistribution::parse("3:1"), 1, rng),
                  std::invalid_argument);
}

TEST_CASE("parity repair touches at most the last entry, by +1") {
  Rng seeds(3);
  for (int trial = 0; trial < 300; ++trial) {
    const auto p = random_distribution(seeds);
    Rng rng(seeds());
    const std::size_t n = 2 + trial % 17;
    const auto seq = sample_degree_sequence(p, n, rng);
    CHECK(seq.has_even_total());
    for (std::size_t i = 0; i + 1 < n; ++i) CHECK(p.probability(seq[i]) > 0.0);
    const auto last = seq[n - 1];
    if (p.probability(last) == 0.0) {
      CHECK(p.probability(last - 1) > 0.0);
      CHECK((seq.total_degree() - 1) % 2 == 1);
    }
  }
}

TEST_CASE("empirical distribution of a sequence") {
  const auto e = DegreeSequence({3, 3, 4, 5}).empirical_distribution();
  CHECK(e.probability(3) == doctest::Approx(0.5));
  CHECK(e.probability(5) == doctest::Approx(0.25));
  CHECK(total_variation(e, DegreeDistribution::parse("3:0.5,4:0.25,5:0.25")) ==
        doctest::Approx(0.0));
  CHECK(total_variation(DegreeDistribution::parse("3:1"), DegreeDistribution::parse("4:1")) ==
        doctest::Approx(1.0));
}
