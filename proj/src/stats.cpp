#include "discbench/stats.hpp"

#include "discbench/errors.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

namespace discbench {

TTestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ArgumentError("paired t-test: samples differ in length");
  const std::size_t n = a.size();
  if (n < 2) throw ArgumentError("paired t-test: need at least two pairs");

  std::vector<double> diff(n);
  for (std::size_t i = 0; i < n; ++i) diff[i] = a[i] - b[i];
  const double mean = std::accumulate(diff.begin(), diff.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double d : diff) ss += (d - mean) * (d - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));

  TTestResult out;
  if (sd == 0.0) {
    if (mean == 0.0) return out;
    out.t_stat = mean > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    out.p_value = 0.0;
    return out;
  }
  out.t_stat = mean / (sd / std::sqrt(static_cast<double>(n)));
  const boost::math::students_t dist(static_cast<double>(n - 1));
  out.p_value = std::clamp(2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(out.t_stat))), 0.0, 1.0);
  return out;
}

double wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ArgumentError("wilcoxon: samples differ in length");
  if (a.empty()) throw ArgumentError("wilcoxon: empty samples");

  std::vector<double> diff;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) diff.push_back(a[i] - b[i]);
  const std::size_t n = diff.size();
  if (n == 0) return 1.0;

  // Average ranks of |d|, doubled so tied ranks stay integral.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return std::abs(diff[l]) < std::abs(diff[r]); });
  std::vector<std::int64_t> rank2(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && std::abs(diff[order[j + 1]]) == std::abs(diff[order[i]])) ++j;
    const auto shared = static_cast<std::int64_t>(i + 1 + j + 1);  // 2 * average of ranks i+1..j+1
    for (std::size_t k = i; k <= j; ++k) rank2[order[k]] = shared;
    i = j + 1;
  }
  std::int64_t observed = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (diff[i] > 0) observed += rank2[i];

  if (n <= static_cast<std::size_t>(kWilcoxonExactLimit)) {
    const std::uint64_t patterns = std::uint64_t{1} << n;
    std::uint64_t at_most = 0, at_least = 0;
    for (std::uint64_t mask = 0; mask < patterns; ++mask) {
      std::int64_t w = 0;
      for (std::size_t i = 0; i < n; ++i)
        if (mask >> i & 1U) w += rank2[i];
      at_most += w <= observed;
      at_least += w >= observed;
    }
    const double total = static_cast<double>(patterns);
    return std::min(1.0, 2.0 * std::min(static_cast<double>(at_most), static_cast<double>(at_least)) / total);
  }

  const double nn = static_cast<double>(n);
  const double mean = nn * (nn + 1.0) / 4.0;
  double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && rank2[order[j + 1]] == rank2[order[i]]) ++j;
    const double t = static_cast<double>(j - i + 1);
    var -= (t * t * t - t) / 48.0;
    i = j + 1;
  }
  if (!(var > 0.0)) return 1.0;
  const double z = (static_cast<double>(observed) / 2.0 - mean) / std::sqrt(var);
  const boost::math::normal_distribution<double> norm;
  return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(norm, std::abs(z))));
}

std::vector<ParetoEntry> pareto_frontier(std::vector<ParetoEntry> entries) {
  for (auto& e : entries) {
    e.dominated = false;
    for (const auto& other : entries) {
      const bool no_worse = other.seconds <= e.seconds && other.accuracy >= e.accuracy;
      const bool better = other.seconds < e.seconds || other.accuracy > e.accuracy;
      if (no_worse && better) {
        e.dominated = true;
        break;
      }
    }
  }
  return entries;
}

double pearson_correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ArgumentError("correlation: series differ in length");
  if (x.size() < 2) throw ArgumentError("correlation: need at least two points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw UndefinedCorrelationError("correlation undefined: a series has zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double ratio_correlation(std::span<const RatioConfig> configs) {
  if (configs.size() < 3) throw ArgumentError("ratio correlation needs at least three configurations");
  std::vector<double> ratio, gain;
  for (const auto& c : configs) {
    if (!(c.num_classes > 1.0)) throw ArgumentError("ratio correlation: need C > 1");
    ratio.push_back(c.feature_dim / (c.num_classes - 1.0));
    gain.push_back(c.lda_accuracy - c.full_accuracy);
  }
  return pearson_correlation(ratio, gain);
}

}  // namespace discbench
