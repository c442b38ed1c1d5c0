#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fpplab/rng.hpp"

namespace fpplab {

/// Edge-weight families. Exponential, shifted exponential and gamma satisfy
/// the exponential-tail hypothesis; uniform (bounded support) and Lomax
/// (polynomial tail) exist to exercise the rejection paths.
namespace law {
struct Exponential {
  double rate;
};
struct ShiftedExponential {
  double rate;
  double shift;
};
struct Gamma {
  double shape;
  double rate;
};
struct Uniform {
  double lo;
  double hi;
};
struct Lomax {
  double shape;
  double scale;
};
struct Empirical {
  std::vector<double> samples;
};
}  // namespace law

enum class TailClass { heavy, admissible, superexponential };

std::string_view to_string(TailClass c) noexcept;

/// The limit c of -log(1 - G(x)) / x, which may be 0 or +inf.
struct TailExponent {
  double value;
  TailClass classification;

  static TailExponent classify(double c) noexcept;
  bool admissible() const noexcept { return classification == TailClass::admissible; }
};

/// Quadrature failed to reach the requested tolerance.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_(achieved) {}
  double achieved_tolerance() const noexcept { return achieved_; }

 private:
  double achieved_;
};

enum class Evaluation { automatic, closed_form, quadrature };

/// A positive continuous edge-weight law G. Immutable after construction.
class WeightLaw {
 public:
  using Family = std::variant<law::Exponential, law::ShiftedExponential, law::Gamma,
                              law::Uniform, law::Lomax, law::Empirical>;

  explicit WeightLaw(Family family);

  static WeightLaw exponential(double rate) { return WeightLaw(law::Exponential{rate}); }
  static WeightLaw shifted_exponential(double rate, double shift) {
    return WeightLaw(law::ShiftedExponential{rate, shift});
  }
  static WeightLaw gamma(double shape, double rate) { return WeightLaw(law::Gamma{shape, rate}); }
  static WeightLaw uniform(double lo, double hi) { return WeightLaw(law::Uniform{lo, hi}); }
  static WeightLaw lomax(double shape, double scale) {
    return WeightLaw(law::Lomax{shape, scale});
  }
  static WeightLaw empirical(std::vector<double> samples) {
    return WeightLaw(law::Empirical{std::move(samples)});
  }

  /// Parses `family:p1,p2` with family one of exp, sexp, gamma, uniform,
  /// lomax (e.g. `exp:1.0`, `gamma:2.0,1.0`).
  static WeightLaw parse(std::string_view text);
  std::string to_string() const;

  const Family& family() const noexcept { return family_; }
  bool is_empirical() const noexcept { return std::holds_alternative<law::Empirical>(family_); }

  double sample(Rng& rng) const;
  double cdf(double x) const;
  double survival(double x) const;
  /// Lebesgue density; not defined for empirical laws.
  double density(double x) const;

  /// Exact tail exponent of an analytic family. Throws for empirical laws.
  TailExponent tail_exponent() const;

  /// E[exp(-alpha X)].
  double laplace_transform(double alpha, Evaluation how = Evaluation::automatic) const;
  /// E[X exp(-alpha X)], minus the derivative of the Laplace transform.
  double tilted_mean(double alpha, Evaluation how = Evaluation::automatic) const;

  bool has_closed_form() const noexcept;

 private:
  double integrate_against_density(double alpha, int power) const;

  Family family_;
};

enum class TailModel {
  linear,         // -log Gbar(x) = c x + a
  log_corrected,  // -log Gbar(x) = c x + b log x + a
};

struct TailFitOptions {
  TailModel model = TailModel::log_corrected;
  std::size_t bootstrap_replicates = 200;
  double band_level = 0.95;
  std::uint64_t bootstrap_seed = 0x7a11;
  /// Below this many samples the empirical tail is too thin to fit.
  std::size_t min_samples = 10'000;
};

struct TailEstimate {
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  TailClass classification = TailClass::admissible;
  std::size_t points_used = 0;
  /// Slope of log(-log Gbar) against log(x - sample minimum) on the grid.
  double shape_index = 0.0;
};

/// Shape-index cutoffs used by the classification.
inline constexpr double kHeavyShapeIndex = 0.5;
inline constexpr double kSuperexponentialShapeIndex = 3.0;

/// Empirical quantiles of `samples` at evenly spaced levels in [lo, hi].
std::vector<double> quantile_grid(std::span<const double> samples, double lo = 0.5,
                                  double hi = 0.9999, std::size_t points = 60);

/// Weighted least-squares fit of -log of the empirical survival function on
/// `grid`. Grid points where the empirical survival is zero are trimmed; if
/// too few remain the fit is rejected. The band is a percentile bootstrap,
/// widened by the shift between the full-grid fit and the upper-half fit.
/// The estimate is superexponential when the shape index exceeds
/// kSuperexponentialShapeIndex, otherwise heavy when the band reaches zero or
/// the shape index is below kHeavyShapeIndex.
TailEstimate estimate_tail_exponent(std::span<const double> samples, std::span<const double> grid,
                                    const TailFitOptions& options = {});

/// Same, on the default quantile grid for the chosen model.
TailEstimate estimate_tail_exponent(std::span<const double> samples,
                                    const TailFitOptions& options = {});

}  // namespace fpplab
