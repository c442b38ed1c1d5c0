#include "fpplab/weights.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Dense>
#include <boost/math/distributions/gamma.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "parse_util.hpp"

namespace fpplab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kQuadratureTolerance = 1e-10;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Uniform on the open interval (0, 1): never returns 0 or 1.
double open_uniform(Rng& rng) noexcept {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

bool positive_finite(double x) { return x > 0.0 && std::isfinite(x); }

}  // namespace

std::string_view to_string(TailClass c) noexcept {
  switch (c) {
    case TailClass::heavy: return "heavy";
    case TailClass::admissible: return "admissible";
    case TailClass::superexponential: return "superexponential";
  }
  return "unknown";
}

TailExponent TailExponent::classify(double c) noexcept {
  if (c <= 0.0) return {0.0, TailClass::heavy};
  if (std::isinf(c)) return {kInf, TailClass::superexponential};
  return {c, TailClass::admissible};
}

WeightLaw::WeightLaw(Family family) : family_(std::move(family)) {
  std::visit(overloaded{
                 [](const law::Exponential& f) {
                   require(positive_finite(f.rate), "exponential rate must be positive");
                 },
                 [](const law::ShiftedExponential& f) {
                   require(positive_finite(f.rate), "shifted-exponential rate must be positive");
                   require(f.shift >= 0.0 && std::isfinite(f.shift),
                           "shifted-exponential shift must be non-negative");
                 },
                 [](const law::Gamma& f) {
                   require(positive_finite(f.shape) && positive_finite(f.rate),
                           "gamma shape and rate must be positive");
                 },
                 [](const law::Uniform& f) {
                   require(f.lo >= 0.0 && std::isfinite(f.hi) && f.hi > f.lo,
                           "uniform law needs 0 <= lo < hi");
                 },
                 [](const law::Lomax& f) {
                   require(positive_finite(f.shape) && positive_finite(f.scale),
                           "lomax shape and scale must be positive");
                 },
                 [](law::Empirical& f) {
                   require(!f.samples.empty(), "empirical law needs samples");
                   require(std::all_of(f.samples.begin(), f.samples.end(), positive_finite),
                           "empirical samples must be positive and finite");
                   std::sort(f.samples.begin(), f.samples.end());
                 },
             },
             family_);
}

WeightLaw WeightLaw::parse(std::string_view text) {
  text = detail::trim(text);
  const auto colon = text.find(':');
  if (colon == std::string_view::npos)
    throw std::invalid_argument("weight law must look like family:params, got '" +
                                std::string(text) + "'");
  const auto name = detail::trim(text.substr(0, colon));
  std::vector<double> params;
  for (auto p : detail::split(text.substr(colon + 1), ',')) params.push_back(detail::parse_double(p));

  auto expect = [&](std::size_t count) {
    if (params.size() != count)
      throw std::invalid_argument("weight law '" + std::string(name) + "' takes " +
                                  std::to_string(count) + " parameter(s)");
  };
  if (name == "exp") {
    expect(1);
    return exponential(params[0]);
  }
  if (name == "sexp") {
    expect(2);
    return shifted_exponential(params[0], params[1]);
  }
  if (name == "gamma") {
    expect(2);
    return gamma(params[0], params[1]);
  }
  if (name == "uniform") {
    expect(2);
    return uniform(params[0], params[1]);
  }
  if (name == "lomax") {
    expect(2);
    return lomax(params[0], params[1]);
  }
  throw std::invalid_argument("unknown weight law family '" + std::string(name) + "'");
}

std::string WeightLaw::to_string() const {
  using detail::format_double;
  return std::visit(
      overloaded{
          [](const law::Exponential& f) { return "exp:" + format_double(f.rate); },
          [](const law::ShiftedExponential& f) {
            return "sexp:" + format_double(f.rate) + "," + format_double(f.shift);
          },
          [](const law::Gamma& f) {
            return "gamma:" + format_double(f.shape) + "," + format_double(f.rate);
          },
          [](const law::Uniform& f) {
            return "uniform:" + format_double(f.lo) + "," + format_double(f.hi);
          },
          [](const law::Lomax& f) {
            return "lomax:" + format_double(f.shape) + "," + format_double(f.scale);
          },
          [](const law::Empirical& f) {
            return "empirical:" + std::to_string(f.samples.size());
          },
      },
      family_);
}

double WeightLaw::sample(Rng& rng) const {
  return std::visit(
      overloaded{
          [&](const law::Exponential& f) { return -std::log(open_uniform(rng)) / f.rate; },
          [&](const law::ShiftedExponential& f) {
            return f.shift + -std::log(open_uniform(rng)) / f.rate;
          },
          [&](const law::Gamma& f) {
            std::gamma_distribution<double> dist(f.shape, 1.0 / f.rate);
            double x = 0.0;
            do x = dist(rng);
            while (!(x > 0.0));
            return x;
          },
          [&](const law::Uniform& f) { return f.lo + (f.hi - f.lo) * open_uniform(rng); },
          [&](const law::Lomax& f) {
            return f.scale * std::expm1(-std::log(open_uniform(rng)) / f.shape);
          },
          [&](const law::Empirical& f) {
            std::uniform_int_distribution<std::size_t> pick(0, f.samples.size() - 1);
            return f.samples[pick(rng)];
          },
      },
      family_);
}

double WeightLaw::survival(double x) const {
  if (x <= 0.0 && !std::holds_alternative<law::Empirical>(family_)) return 1.0;
  return std::visit(
      overloaded{
          [&](const law::Exponential& f) { return std::exp(-f.rate * x); },
          [&](const law::ShiftedExponential& f) {
            return x <= f.shift ? 1.0 : std::exp(-f.rate * (x - f.shift));
          },
          [&](const law::Gamma& f) { return boost::math::gamma_q(f.shape, f.rate * x); },
          [&](const law::Uniform& f) {
            if (x <= f.lo) return 1.0;
            if (x >= f.hi) return 0.0;
            return (f.hi - x) / (f.hi - f.lo);
          },
          [&](const law::Lomax& f) { return std::pow(1.0 + x / f.scale, -f.shape); },
          [&](const law::Empirical& f) {
            const auto above = f.samples.end() - std::upper_bound(f.samples.begin(),
                                                                  f.samples.end(), x);
            return static_cast<double>(above) / static_cast<double>(f.samples.size());
          },
      },
      family_);
}

double WeightLaw::cdf(double x) const {
  if (x <= 0.0) return 0.0;
  return std::visit(
      overloaded{
          [&](const law::Exponential& f) { return -std::expm1(-f.rate * x); },
          [&](const law::ShiftedExponential& f) {
            return x <= f.shift ? 0.0 : -std::expm1(-f.rate * (x - f.shift));
          },
          [&](const law::Gamma& f) { return boost::math::gamma_p(f.shape, f.rate * x); },
          [&](const auto&) { return 1.0 - survival(x); },
      },
      family_);
}

double WeightLaw::density(double x) const {
  return std::visit(
      overloaded{
          [&](const law::Exponential& f) { return x < 0.0 ? 0.0 : f.rate * std::exp(-f.rate * x); },
          [&](const law::ShiftedExponential& f) {
            return x < f.shift ? 0.0 : f.rate * std::exp(-f.rate * (x - f.shift));
          },
          [&](const law::Gamma& f) {
            if (x <= 0.0) return 0.0;
            return boost::math::pdf(boost::math::gamma_distribution<double>(f.shape, 1.0 / f.rate),
                                    x);
          },
          [&](const law::Uniform& f) {
            return (x < f.lo || x > f.hi) ? 0.0 : 1.0 / (f.hi - f.lo);
          },
          [&](const law::Lomax& f) {
            return x < 0.0 ? 0.0 : f.shape / f.scale * std::pow(1.0 + x / f.scale, -f.shape - 1.0);
          },
          [](const law::Empirical&) -> double {
            throw std::invalid_argument("empirical weight laws have no density");
          },
      },
      family_);
}

TailExponent WeightLaw::tail_exponent() const {
  return std::visit(
      overloaded{
          [](const law::Exponential& f) { return TailExponent::classify(f.rate); },
          [](const law::ShiftedExponential& f) { return TailExponent::classify(f.rate); },
          // (rate x)^{shape-1} e^{-rate x} prefactors vanish under log / x.
          [](const law::Gamma& f) { return TailExponent::classify(f.rate); },
          [](const law::Uniform&) { return TailExponent::classify(kInf); },
          [](const law::Lomax&) { return TailExponent::classify(0.0); },
          [](const law::Empirical&) -> TailExponent {
            throw std::invalid_argument(
                "tail_exponent is defined for analytic families only; use "
                "estimate_tail_exponent on samples");
          },
      },
      family_);
}

bool WeightLaw::has_closed_form() const noexcept {
  return !std::holds_alternative<law::Lomax>(family_);
}

double WeightLaw::integrate_against_density(double alpha, int power) const {
  double lo = 0.0;
  double hi = 0.0;
  if (const auto* u = std::get_if<law::Uniform>(&family_)) {
    lo = u->lo;
    hi = u->hi;
  } else {
    if (const auto* s = std::get_if<law::ShiftedExponential>(&family_)) lo = s->shift;
    // e^{-alpha (hi - lo)} is far below 1e-14.
    hi = lo + 40.0 / alpha;
  }
  auto integrand = [&](double t) {
    const double base = std::exp(-alpha * t) * density(t);
    return power == 0 ? base : t * base;
  };
  double error = 0.0;
  boost::math::quadrature::tanh_sinh<double> integrator;
  const double value = integrator.integrate(integrand, lo, hi, 1e-13, &error);
  if (!(error <= kQuadratureTolerance) || !std::isfinite(value))
    throw QuadratureError("quadrature did not converge for " + to_string(), error);
  return value;
}

double WeightLaw::laplace_transform(double alpha, Evaluation how) const {
  if (!(alpha > 0.0)) throw std::invalid_argument("laplace_transform: alpha must be positive");
  if (const auto* e = std::get_if<law::Empirical>(&family_)) {
    double acc = 0.0;
    for (double x : e->samples) acc += std::exp(-alpha * x);
    return acc / static_cast<double>(e->samples.size());
  }
  const bool closed = how == Evaluation::closed_form ||
                      (how == Evaluation::automatic && has_closed_form());
  if (!closed) return integrate_against_density(alpha, 0);
  return std::visit(
      overloaded{
          [&](const law::Exponential& f) { return f.rate / (f.rate + alpha); },
          [&](const law::ShiftedExponential& f) {
            return std::exp(-alpha * f.shift) * f.rate / (f.rate + alpha);
          },
          [&](const law::Gamma& f) { return std::pow(f.rate / (f.rate + alpha), f.shape); },
          [&](const law::Uniform& f) {
            return (std::exp(-alpha * f.lo) - std::exp(-alpha * f.hi)) / (alpha * (f.hi - f.lo));
          },
          [&](const auto&) -> double {
            throw std::invalid_argument("no closed-form Laplace transform for " + to_string());
          },
      },
      family_);
}

double WeightLaw::tilted_mean(double alpha, Evaluation how) const {
  if (!(alpha > 0.0)) throw std::invalid_argument("tilted_mean: alpha must be positive");
  if (const auto* e = std::get_if<law::Empirical>(&family_)) {
    double acc = 0.0;
    for (double x : e->samples) acc += x * std::exp(-alpha * x);
    return acc / static_cast<double>(e->samples.size());
  }
  const bool closed = how == Evaluation::closed_form ||
                      (how == Evaluation::automatic && has_closed_form());
  if (!closed) return integrate_against_density(alpha, 1);
  return std::visit(
      overloaded{
          [&](const law::Exponential& f) {
            return f.rate / ((f.rate + alpha) * (f.rate + alpha));
          },
          [&](const law::ShiftedExponential& f) {
            const double r = f.rate / (f.rate + alpha);
            return std::exp(-alpha * f.shift) * (f.shift * r + r / (f.rate + alpha));
          },
          [&](const law::Gamma& f) {
            return f.shape / (f.rate + alpha) * std::pow(f.rate / (f.rate + alpha), f.shape);
          },
          [&](const law::Uniform& f) {
            auto antideriv = [&](double y) {  // d/dy of this is -y e^{-alpha y}
              return (y / alpha + 1.0 / (alpha * alpha)) * std::exp(-alpha * y);
            };
            return (antideriv(f.lo) - antideriv(f.hi)) / (f.hi - f.lo);
          },
          [&](const auto&) -> double {
            throw std::invalid_argument("no closed-form tilted mean for " + to_string());
          },
      },
      family_);
}

// ---------------------------------------------------------------------------
// Tail-exponent estimation

std::vector<double> quantile_grid(std::span<const double> samples, double lo, double hi,
                                  std::size_t points) {
  if (samples.empty()) throw std::invalid_argument("quantile_grid: no samples");
  if (!(0.0 <= lo && lo < hi && hi < 1.0) || points < 2)
    throw std::invalid_argument("quantile_grid: need 0 <= lo < hi < 1 and at least 2 points");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> grid;
  grid.reserve(points);
  const double last = static_cast<double>(sorted.size() - 1);
  for (std::size_t j = 0; j < points; ++j) {
    const double level = lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(points - 1);
    const double pos = level * last;
    const auto i = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(i);
    const double x = i + 1 < sorted.size() ? sorted[i] + frac * (sorted[i + 1] - sorted[i])
                                           : sorted[i];
    if (grid.empty() || x > grid.back()) grid.push_back(x);
  }
  return grid;
}

namespace {

std::size_t parameter_count(TailModel model) { return model == TailModel::linear ? 2 : 3; }

// Fits the model to (x_j, survivors_j / total). Returns NaN if too few points
// survive trimming.
double fit_tail(std::span<const double> grid, std::span<const std::uint64_t> survivors,
                std::uint64_t total, TailModel model, std::size_t* used = nullptr) {
  const std::size_t params = parameter_count(model);
  std::vector<std::size_t> keep;
  for (std::size_t j = 0; j < grid.size(); ++j)
    if (survivors[j] > 0 && survivors[j] < total) keep.push_back(j);
  if (used != nullptr) *used = keep.size();
  if (keep.size() < params + 1) return std::numeric_limits<double>::quiet_NaN();

  const double n = static_cast<double>(total);
  Eigen::MatrixXd a(keep.size(), params);
  Eigen::VectorXd y(keep.size());
  for (std::size_t r = 0; r < keep.size(); ++r) {
    const double x = grid[keep[r]];
    const double gbar = static_cast<double>(survivors[keep[r]]) / n;
    // Delta method: Var(-log Gbar_emp) ~ (1 - Gbar) / (n Gbar).
    const double w = std::sqrt(n * gbar / (1.0 - gbar));
    a(r, 0) = w * x;
    a(r, 1) = w;
    if (model == TailModel::log_corrected) a(r, 2) = w * std::log(x);
    y(r) = -w * std::log(gbar);
  }
  const Eigen::VectorXd coef = a.colPivHouseholderQr().solve(y);
  return coef(0);
}

// Slope of log(-log Gbar) against log(x - origin): 1 for exponential tails,
// near 0 for polynomial tails, large for bounded support.
double shape_index(std::span<const double> grid, std::span<const std::uint64_t> survivors,
                   std::uint64_t total, double origin) {
  std::vector<std::pair<double, double>> pts;
  for (std::size_t j = 0; j < grid.size(); ++j)
    if (survivors[j] > 0 && survivors[j] < total && grid[j] > origin) {
      const double gbar = static_cast<double>(survivors[j]) / static_cast<double>(total);
      pts.emplace_back(std::log(grid[j] - origin), std::log(-std::log(gbar)));
    }
  if (pts.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  Eigen::MatrixXd a(pts.size(), 2);
  Eigen::VectorXd y(pts.size());
  for (std::size_t r = 0; r < pts.size(); ++r) {
    a(r, 0) = pts[r].first;
    a(r, 1) = 1.0;
    y(r) = pts[r].second;
  }
  return a.colPivHouseholderQr().solve(y)(0);
}

double percentile(std::vector<double>& values, double level) {
  std::sort(values.begin(), values.end());
  const double pos = level * static_cast<double>(values.size() - 1);
  const auto i = static_cast<std::size_t>(pos);
  if (i + 1 >= values.size()) return values.back();
  return values[i] + (pos - static_cast<double>(i)) * (values[i + 1] - values[i]);
}

}  // namespace

TailEstimate estimate_tail_exponent(std::span<const double> samples, std::span<const double> grid,
                                    const TailFitOptions& options) {
  if (samples.size() < options.min_samples)
    throw std::invalid_argument("estimate_tail_exponent: need at least " +
                                std::to_string(options.min_samples) + " samples");
  if (!std::all_of(samples.begin(), samples.end(), positive_finite))
    throw std::invalid_argument("estimate_tail_exponent: samples must be positive and finite");
  if (grid.empty()) throw std::invalid_argument("estimate_tail_exponent: empty grid");

  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> xs(grid.begin(), grid.end());
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  if (xs.front() < sorted.front() || xs.back() > sorted.back())
    throw std::invalid_argument("estimate_tail_exponent: grid extends beyond the observed range");

  const std::uint64_t total = sorted.size();
  // bins[0] = #{s <= x_0}, bins[j] = #{x_{j-1} < s <= x_j}, bins[J] = #{s > x_{J-1}}
  std::vector<std::uint64_t> bins(xs.size() + 1, 0);
  std::size_t prev = 0;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    const auto at = static_cast<std::size_t>(
        std::upper_bound(sorted.begin(), sorted.end(), xs[j]) - sorted.begin());
    bins[j] = at - prev;
    prev = at;
  }
  bins.back() = total - prev;

  auto survivors_from = [&](const std::vector<std::uint64_t>& b) {
    std::vector<std::uint64_t> s(xs.size());
    std::uint64_t above = b.back();
    for (std::size_t j = xs.size(); j-- > 0;) {
      s[j] = above;
      above += b[j];
    }
    return s;
  };

  TailEstimate est;
  est.value = fit_tail(xs, survivors_from(bins), total, options.model, &est.points_used);
  if (std::isnan(est.value))
    throw std::invalid_argument(
        "estimate_tail_exponent: too few grid points with a non-empty tail after trimming");

  Rng rng(options.bootstrap_seed);
  std::vector<double> replicates;
  replicates.reserve(options.bootstrap_replicates);
  std::vector<std::uint64_t> resampled(bins.size());
  for (std::size_t b = 0; b < options.bootstrap_replicates; ++b) {
    // Multinomial(total, bins / total) by sequential conditional binomials.
    std::uint64_t remaining = total;
    std::uint64_t mass_left = total;
    for (std::size_t j = 0; j < bins.size(); ++j) {
      if (j + 1 == bins.size() || remaining == 0) {
        resampled[j] = remaining;
      } else {
        const double p = static_cast<double>(bins[j]) / static_cast<double>(mass_left);
        std::binomial_distribution<std::uint64_t> draw(remaining, std::min(p, 1.0));
        resampled[j] = draw(rng);
      }
      remaining -= resampled[j];
      mass_left -= bins[j];
    }
    const double c = fit_tail(xs, survivors_from(resampled), total, options.model);
    if (!std::isnan(c)) replicates.push_back(c);
  }
  if (replicates.empty()) {
    est.lower = est.upper = est.value;
  } else {
    const double tail = (1.0 - options.band_level) / 2.0;
    est.lower = percentile(replicates, tail);
    est.upper = percentile(replicates, 1.0 - tail);
  }
  // Model bias: shift of the estimate when only the upper half of the grid is used.
  const std::size_t half = xs.size() / 2;
  const auto full = survivors_from(bins);
  const double upper_fit =
      fit_tail(std::span(xs).subspan(half), std::span(full).subspan(half), total, options.model);
  if (!std::isnan(upper_fit)) {
    const double shift = std::abs(upper_fit - est.value);
    est.lower -= shift;
    est.upper += shift;
  }
  est.shape_index = shape_index(xs, full, total, sorted.front());
  if (est.shape_index > kSuperexponentialShapeIndex)
    est.classification = TailClass::superexponential;
  else if (est.lower <= 0.0 || est.shape_index < kHeavyShapeIndex)
    est.classification = TailClass::heavy;
  else
    est.classification = TailClass::admissible;
  return est;
}

TailEstimate estimate_tail_exponent(std::span<const double> samples,
                                    const TailFitOptions& options) {
  const auto grid = options.model == TailModel::linear ? quantile_grid(samples, 0.95, 0.9999, 40)
                                                       : quantile_grid(samples, 0.7, 0.9999, 60);
  return estimate_tail_exponent(samples, grid, options);
}

}  // namespace fpplab
