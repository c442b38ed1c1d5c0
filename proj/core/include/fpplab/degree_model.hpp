#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fpplab/rng.hpp"

namespace fpplab {

/// A finite-support degree law (p_k). Entries with zero mass are dropped;
/// the remaining masses must sum to 1 within 1e-12.
class DegreeDistribution {
 public:
  struct Mass {
    std::uint32_t k;
    double p;
  };

  DegreeDistribution() = default;
  explicit DegreeDistribution(std::vector<Mass> support);

  /// Parses `k:p,k:p,...` (e.g. `3:0.5,4:0.5`).
  static DegreeDistribution parse(std::string_view text);

  std::span<const Mass> support() const noexcept { return support_; }
  double mean() const noexcept { return mean_; }
  std::uint32_t min_degree() const noexcept { return support_.front().k; }
  std::uint32_t max_degree() const noexcept { return support_.back().k; }
  double probability(std::uint32_t k) const noexcept;

  /// All support points are >= 3 (the minimum-degree regularity condition).
  bool condition1_conforming() const noexcept { return min_degree() >= 3; }

  std::string to_string() const;

 private:
  std::vector<Mass> support_;  // sorted by k, all p > 0
  double mean_ = 0.0;
};

/// A degree sequence d_1..d_n with cached summary statistics. The total
/// degree may be odd; validate_condition1 reports that and the graph
/// builder rejects it.
class DegreeSequence {
 public:
  DegreeSequence() = default;
  explicit DegreeSequence(std::vector<std::uint32_t> degrees);

  std::span<const std::uint32_t> degrees() const noexcept { return degrees_; }
  std::uint32_t operator[](std::size_t i) const noexcept { return degrees_[i]; }
  std::size_t size() const noexcept { return degrees_.size(); }
  bool empty() const noexcept { return degrees_.empty(); }

  std::uint64_t total_degree() const noexcept { return total_; }
  std::uint32_t min_degree() const noexcept { return min_; }
  std::uint32_t max_degree() const noexcept { return max_; }
  bool has_even_total() const noexcept { return total_ % 2 == 0; }

  /// Fraction of vertices with each degree, as a distribution.
  DegreeDistribution empirical_distribution() const;

  friend bool operator==(const DegreeSequence&, const DegreeSequence&) = default;

 private:
  std::vector<std::uint32_t> degrees_;
  std::uint64_t total_ = 0;
  std::uint32_t min_ = 0;
  std::uint32_t max_ = 0;
};

/// Law of the number of children in the local tree limit: the size-biased
/// law q_k = (k+1) p_{k+1} / m, or its finite-n analogue built from a
/// degree sequence.
struct SizeBiasedLaw {
  struct Mass {
    std::uint32_t k;
    double q;
  };
  std::vector<Mass> support;  // sorted by k
  double nu = 0.0;

  std::uint32_t min_offspring() const noexcept { return support.front().k; }
};

struct ValidationReport {
  std::size_t n = 0;
  std::uint64_t total_degree = 0;
  bool parity_ok = false;
  std::uint32_t min_degree = 0;
  bool min_degree_ok = false;  // d_min >= 3
  std::uint32_t max_degree = 0;
  double delta = 1.0;
  double moment = 0.0;  // (1/n) sum d_i^{2+delta}
  /// Delta_n / sqrt(n / log n); absent for n < 2.
  std::optional<double> max_degree_ratio;
  /// Total-variation distance between the empirical law and the target.
  std::optional<double> tv_distance;

  bool ok() const noexcept { return parity_ok && min_degree_ok; }
};

ValidationReport validate_condition1(const DegreeSequence& seq,
                                     const DegreeDistribution* target = nullptr,
                                     double delta = 1.0);

double total_variation(const DegreeDistribution& a, const DegreeDistribution& b);

SizeBiasedLaw size_biased(const DegreeDistribution& p);

/// q_k = (k+1)/l_n * #{i : d_i = k+1}. The mean is accumulated in integers,
/// so it equals empirical_nu(seq) bit for bit.
SizeBiasedLaw empirical_size_biased(const DegreeSequence& seq);

/// (sum d_i^2 - sum d_i) / sum d_i.
double empirical_nu(const DegreeSequence& seq);

/// Draws n i.i.d. degrees from p. An odd total is repaired by adding one
/// to the last entry.
DegreeSequence sample_degree_sequence(const DegreeDistribution& p, std::size_t n,
                                      Rng& rng);

}  // namespace fpplab
