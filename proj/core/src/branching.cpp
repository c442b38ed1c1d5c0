#include "fpplab/branching.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <stdexcept>

#include <boost/math/tools/toms748_solve.hpp>

namespace fpplab {

double malthusian_parameter(double nu, const WeightLaw& lifetime) {
  if (!(nu > 1.0) || !std::isfinite(nu))
    throw std::invalid_argument("malthusian_parameter: nu must exceed 1 (supercritical)");
  auto f = [&](double alpha) { return nu * lifetime.laplace_transform(alpha) - 1.0; };

  // f(0+) = nu - 1 > 0 and f decreases to -1.
  double lo = 0.0;
  double hi = 1.0;
  while (f(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) throw std::runtime_error("malthusian_parameter: failed to bracket the root");
  }
  const double f_lo = lo == 0.0 ? nu - 1.0 : f(lo);
  const double f_hi = f(hi);
  if (f_hi == 0.0) return hi;

  std::uintmax_t iterations = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(
      f, lo, hi, f_lo, f_hi, boost::math::tools::eps_tolerance<double>(52), iterations);
  const double fa = std::abs(f(a));
  const double fb = std::abs(f(b));
  const double alpha = fa <= fb ? a : b;
  const double residual = std::min(fa, fb);
  if (!(alpha > 0.0) || residual >= 1e-10)
    throw std::runtime_error("malthusian_parameter: residual " + std::to_string(residual) +
                             " above 1e-10");
  return alpha;
}

double growth_constant(double nu, double alpha, const WeightLaw& lifetime, Evaluation how) {
  if (!(nu > 1.0)) throw std::invalid_argument("growth_constant: nu must exceed 1");
  if (!(alpha > 0.0)) throw std::invalid_argument("growth_constant: alpha must be positive");
  const double tilted = lifetime.tilted_mean(alpha, how);
  return (nu - 1.0) / (alpha * nu * nu * tilted);
}

BranchingSpec::BranchingSpec(SizeBiasedLaw offspring, WeightLaw lifetime,
                             std::uint64_t initial_population)
    : offspring_(std::move(offspring)), lifetime_(std::move(lifetime)), initial_(initial_population) {
  if (offspring_.support.empty()) throw std::invalid_argument("offspring law has empty support");
  if (initial_ == 0) throw std::invalid_argument("initial population must be positive");
  if (!(offspring_.nu > 1.0))
    throw std::invalid_argument("branching process must be supercritical (nu > 1)");
  double acc = 0.0;
  for (const auto& m : offspring_.support) {
    acc += m.q;
    cumulative_.push_back(acc);
  }
  alpha_ = malthusian_parameter(offspring_.nu, lifetime_);
  c_prime_ = growth_constant(offspring_.nu, alpha_, lifetime_);
}

BranchingSpec BranchingSpec::from_degree_law(const DegreeDistribution& p, WeightLaw lifetime) {
  return BranchingSpec(size_biased(p), std::move(lifetime), p.min_degree());
}

std::uint32_t BranchingSpec::sample_offspring(Rng& rng) const {
  if (offspring_.support.size() == 1) return offspring_.support.front().k;
  const double u = uniform01(rng) * cumulative_.back();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const auto i = std::min<std::size_t>(it - cumulative_.begin(), cumulative_.size() - 1);
  return offspring_.support[i].k;
}

std::uint64_t PopulationTrajectory::population_at(double t) const {
  if (events.empty()) throw std::logic_error("empty trajectory");
  const auto it = std::upper_bound(events.begin(), events.end(), t,
                                   [](double x, const PopulationEvent& e) { return x < e.time; });
  return it == events.begin() ? events.front().population : std::prev(it)->population;
}

std::uint64_t PopulationTrajectory::peak() const {
  std::uint64_t best = 0;
  for (const auto& e : events) best = std::max(best, e.population);
  return best;
}

PopulationTrajectory simulate_cmj(const BranchingSpec& spec, const StopRule& stop, Rng& rng) {
  const auto* cap = std::get_if<SizeCap>(&stop);
  const auto* horizon = std::get_if<TimeHorizon>(&stop);
  if (cap != nullptr && cap->size < spec.initial_population())
    throw std::invalid_argument("simulate_cmj: size cap below the initial population");
  if (horizon != nullptr && !(horizon->t >= 0.0))
    throw std::invalid_argument("simulate_cmj: time horizon must be non-negative");

  // (death time, birth order)
  using Death = std::pair<double, std::uint64_t>;
  std::priority_queue<Death, std::vector<Death>, std::greater<>> alive;
  std::uint64_t births = 0;
  for (std::uint64_t i = 0; i < spec.initial_population(); ++i)
    alive.emplace(spec.lifetime().sample(rng), births++);

  PopulationTrajectory traj;
  std::uint64_t population = spec.initial_population();
  traj.events.push_back({0.0, population});
  if (cap != nullptr && population >= cap->size) {
    traj.terminal_reason = TerminalReason::size_cap;
    return traj;
  }

  while (true) {
    if (alive.empty()) {
      traj.terminal_reason = TerminalReason::extinction;
      break;
    }
    const double t = alive.top().first;
    if (horizon != nullptr && t > horizon->t) {
      traj.terminal_reason = TerminalReason::time_horizon;
      break;
    }
    alive.pop();
    const auto children = spec.sample_offspring(rng);
    for (std::uint32_t c = 0; c < children; ++c)
      alive.emplace(t + spec.lifetime().sample(rng), births++);
    population = population + children - 1;
    traj.events.push_back({t, population});
    if (cap != nullptr && population >= cap->size) {
      traj.terminal_reason = TerminalReason::size_cap;
      break;
    }
  }
  return traj;
}

double estimate_growth_rate(const PopulationTrajectory& traj, double burn_in_fraction,
                            std::uint64_t min_peak) {
  if (!(burn_in_fraction >= 0.0 && burn_in_fraction < 1.0))
    throw std::invalid_argument("estimate_growth_rate: burn-in fraction must lie in [0, 1)");
  if (traj.peak() < min_peak)
    throw std::invalid_argument("estimate_growth_rate: trajectory peaked at " +
                                std::to_string(traj.peak()) + " < " + std::to_string(min_peak));
  const auto first = static_cast<std::size_t>(burn_in_fraction * static_cast<double>(traj.events.size()));
  double mean_t = 0.0, mean_y = 0.0;
  std::size_t count = 0;
  for (std::size_t i = first; i < traj.events.size(); ++i) {
    if (traj.events[i].population == 0) continue;
    mean_t += traj.events[i].time;
    mean_y += std::log(static_cast<double>(traj.events[i].population));
    ++count;
  }
  if (count < 2) throw std::invalid_argument("estimate_growth_rate: too few events after burn-in");
  mean_t /= static_cast<double>(count);
  mean_y /= static_cast<double>(count);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = first; i < traj.events.size(); ++i) {
    if (traj.events[i].population == 0) continue;
    const double dt = traj.events[i].time - mean_t;
    sxx += dt * dt;
    sxy += dt * (std::log(static_cast<double>(traj.events[i].population)) - mean_y);
  }
  if (!(sxx > 0.0))
    throw std::invalid_argument("estimate_growth_rate: event times after burn-in do not vary");
  return sxy / sxx;
}

}  // namespace fpplab
