#include "fpplab/degree_model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "parse_util.hpp"

namespace fpplab {

namespace {
constexpr double kMassTolerance = 1e-12;
}

DegreeDistribution::DegreeDistribution(std::vector<Mass> support) {
  std::erase_if(support, [](const Mass& m) { return m.p == 0.0; });
  if (support.empty()) throw std::invalid_argument("degree distribution has empty support");
  std::sort(support.begin(), support.end(),
            [](const Mass& a, const Mass& b) { return a.k < b.k; });
  double total = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i) {
    const auto& m = support[i];
    if (!(m.p > 0.0) || !std::isfinite(m.p))
      throw std::invalid_argument("degree probabilities must be positive and finite");
    if (m.k == 0) throw std::invalid_argument("degrees must be positive integers");
    if (i > 0 && support[i - 1].k == m.k)
      throw std::invalid_argument("duplicate degree " + std::to_string(m.k));
    total += m.p;
  }
  if (std::abs(total - 1.0) > kMassTolerance)
    throw std::invalid_argument("degree probabilities sum to " + detail::format_double(total) +
                                ", expected 1");
  support_ = std::move(support);
  mean_ = 0.0;
  for (const auto& m : support_) mean_ += m.k * m.p;
}

DegreeDistribution DegreeDistribution::parse(std::string_view text) {
  std::vector<Mass> masses;
  for (auto item : detail::split(text, ',')) {
    item = detail::trim(item);
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string_view::npos)
      throw std::invalid_argument("expected k:p in degree law, got '" + std::string(item) + "'");
    const auto k = detail::parse_uint(item.substr(0, colon));
    const double p = detail::parse_double(item.substr(colon + 1));
    masses.push_back({static_cast<std::uint32_t>(k), p});
  }
  return DegreeDistribution(std::move(masses));
}

double DegreeDistribution::probability(std::uint32_t k) const noexcept {
  auto it = std::lower_bound(support_.begin(), support_.end(), k,
                             [](const Mass& m, std::uint32_t key) { return m.k < key; });
  return (it != support_.end() && it->k == k) ? it->p : 0.0;
}

std::string DegreeDistribution::to_string() const {
  std::string out;
  for (const auto& m : support_) {
    if (!out.empty()) out += ',';
    out += std::to_string(m.k) + ':' + detail::format_double(m.p);
  }
  return out;
}

DegreeSequence::DegreeSequence(std::vector<std::uint32_t> degrees)
    : degrees_(std::move(degrees)) {
  if (degrees_.empty()) return;
  if (std::find(degrees_.begin(), degrees_.end(), 0u) != degrees_.end())
    throw std::invalid_argument("degree sequence entries must be positive");
  total_ = std::accumulate(degrees_.begin(), degrees_.end(), std::uint64_t{0});
  const auto [lo, hi] = std::minmax_element(degrees_.begin(), degrees_.end());
  min_ = *lo;
  max_ = *hi;
}

DegreeDistribution DegreeSequence::empirical_distribution() const {
  if (degrees_.empty()) throw std::invalid_argument("empty degree sequence");
  std::map<std::uint32_t, std::size_t> counts;
  for (auto d : degrees_) ++counts[d];
  std::vector<DegreeDistribution::Mass> masses;
  const double n = static_cast<double>(degrees_.size());
  double assigned = 0.0;
  for (auto it = counts.begin(); it != counts.end(); ++it) {
    double p = static_cast<double>(it->second) / n;
    if (std::next(it) == counts.end()) p = 1.0 - assigned;  // absorb rounding
    assigned += p;
    masses.push_back({it->first, p});
  }
  return DegreeDistribution(std::move(masses));
}

double total_variation(const DegreeDistribution& a, const DegreeDistribution& b) {
  std::map<std::uint32_t, double> diff;
  for (const auto& m : a.support()) diff[m.k] += m.p;
  for (const auto& m : b.support()) diff[m.k] -= m.p;
  double sum = 0.0;
  for (const auto& [k, d] : diff) sum += std::abs(d);
  return 0.5 * sum;
}

ValidationReport validate_condition1(const DegreeSequence& seq, const DegreeDistribution* target,
                                     double delta) {
  if (seq.empty()) throw std::invalid_argument("validate_condition1: empty degree sequence");
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw std::invalid_argument("validate_condition1: delta must be positive");

  ValidationReport r;
  r.n = seq.size();
  r.total_degree = seq.total_degree();
  r.parity_ok = seq.has_even_total();
  r.min_degree = seq.min_degree();
  r.min_degree_ok = seq.min_degree() >= 3;
  r.max_degree = seq.max_degree();
  r.delta = delta;

  const double exponent = 2.0 + delta;
  double acc = 0.0;
  for (auto d : seq.degrees()) acc += std::pow(static_cast<double>(d), exponent);
  r.moment = acc / static_cast<double>(seq.size());

  if (seq.size() >= 2) {
    const double n = static_cast<double>(seq.size());
    r.max_degree_ratio = seq.max_degree() / std::sqrt(n / std::log(n));
  }
  if (target != nullptr) r.tv_distance = total_variation(seq.empirical_distribution(), *target);
  return r;
}

SizeBiasedLaw size_biased(const DegreeDistribution& p) {
  if (!(p.mean() > 0.0)) throw std::invalid_argument("size_biased: mean degree must be positive");
  SizeBiasedLaw law;
  for (const auto& m : p.support()) {
    law.support.push_back({m.k - 1, m.k * m.p / p.mean()});
    law.nu += static_cast<double>(m.k - 1) * law.support.back().q;
  }
  return law;
}

SizeBiasedLaw empirical_size_biased(const DegreeSequence& seq) {
  if (seq.total_degree() == 0)
    throw std::invalid_argument("empirical_size_biased: total degree must be positive");
  std::map<std::uint32_t, std::uint64_t> counts;
  for (auto d : seq.degrees()) ++counts[d];

  const double ln = static_cast<double>(seq.total_degree());
  SizeBiasedLaw law;
  std::uint64_t weighted = 0;  // sum over vertices of d(d-1)
  for (const auto& [d, count] : counts) {
    law.support.push_back({d - 1, static_cast<double>(d) * static_cast<double>(count) / ln});
    weighted += static_cast<std::uint64_t>(d) * (d - 1) * count;
  }
  law.nu = static_cast<double>(weighted) / ln;
  return law;
}

double empirical_nu(const DegreeSequence& seq) {
  if (seq.total_degree() == 0) throw std::invalid_argument("empirical_nu: total degree is zero");
  std::uint64_t sum_sq = 0;
  for (auto d : seq.degrees()) sum_sq += static_cast<std::uint64_t>(d) * d;
  return static_cast<double>(sum_sq - seq.total_degree()) /
         static_cast<double>(seq.total_degree());
}

DegreeSequence sample_degree_sequence(const DegreeDistribution& p, std::size_t n, Rng& rng) {
  if (n < 2) throw std::invalid_argument("sample_degree_sequence: n must be at least 2");
  const auto support = p.support();
  std::vector<double> weights;
  weights.reserve(support.size());
  for (const auto& m : support) weights.push_back(m.p);
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());

  std::vector<std::uint32_t> degrees(n);
  std::uint64_t total = 0;
  for (auto& d : degrees) {
    d = support[pick(rng)].k;
    total += d;
  }
  if (total % 2 == 1) ++degrees.back();
  return DegreeSequence(std::move(degrees));
}

}  // namespace fpplab
