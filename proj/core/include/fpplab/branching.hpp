#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "fpplab/degree_model.hpp"
#include "fpplab/rng.hpp"
#include "fpplab/weights.hpp"

namespace fpplab {

/// Unique alpha > 0 with nu * E[exp(-alpha X)] = 1, X ~ lifetime.
/// Requires nu > 1. The residual |nu LT(alpha) - 1| is below 1e-10.
double malthusian_parameter(double nu, const WeightLaw& lifetime);

/// c' = (nu - 1) / (alpha nu^2 E[X exp(-alpha X)]), the constant in
/// E[Z_t] ~ c' exp(alpha t) for a single ancestor.
double growth_constant(double nu, double alpha, const WeightLaw& lifetime,
                       Evaluation how = Evaluation::automatic);

/// A supercritical age-dependent (Crump-Mode-Jagers) process: each
/// individual lives an independent lifetime and is replaced at death by an
/// independent number of children.
class BranchingSpec {
 public:
  BranchingSpec(SizeBiasedLaw offspring, WeightLaw lifetime, std::uint64_t initial_population);

  /// Offspring law size_biased(p), initial population d_min of p.
  static BranchingSpec from_degree_law(const DegreeDistribution& p, WeightLaw lifetime);

  const SizeBiasedLaw& offspring() const noexcept { return offspring_; }
  const WeightLaw& lifetime() const noexcept { return lifetime_; }
  std::uint64_t initial_population() const noexcept { return initial_; }
  double nu() const noexcept { return offspring_.nu; }
  double alpha() const noexcept { return alpha_; }
  double c_prime() const noexcept { return c_prime_; }

  std::uint32_t sample_offspring(Rng& rng) const;

 private:
  SizeBiasedLaw offspring_;
  WeightLaw lifetime_;
  std::uint64_t initial_;
  double alpha_;
  double c_prime_;
  std::vector<double> cumulative_;
};

struct TimeHorizon {
  double t;
};
struct SizeCap {
  std::uint64_t size;
};
using StopRule = std::variant<TimeHorizon, SizeCap>;

enum class TerminalReason { time_horizon, size_cap, extinction };

struct PopulationEvent {
  double time;
  std::uint64_t population;
};

struct PopulationTrajectory {
  /// events[0] is (0, initial population); one entry per death after that.
  std::vector<PopulationEvent> events;
  TerminalReason terminal_reason = TerminalReason::time_horizon;

  /// Population at time t (right-continuous step function).
  std::uint64_t population_at(double t) const;
  std::uint64_t peak() const;
};

/// Event-driven simulation; with a time horizon T every death at time <= T
/// is applied, with a size cap the run stops as soon as the population
/// reaches the cap. Simultaneous deaths resolve in birth order.
PopulationTrajectory simulate_cmj(const BranchingSpec& spec, const StopRule& stop, Rng& rng);

/// Least-squares slope of log(population) against time over the events
/// after the first `burn_in_fraction` of them.
double estimate_growth_rate(const PopulationTrajectory& traj, double burn_in_fraction = 0.2,
                            std::uint64_t min_peak = 1000);

}  // namespace fpplab
