#include "discbench/errors.hpp"
#include "discbench/stats.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>

using namespace discbench;
using testing_support::wilcoxon_oracle;

namespace {

// Student-t two-sided tail by Simpson integration of the density.
double t_two_sided(double t, double df) {
  const double c = std::exp(std::lgamma((df + 1) / 2) - std::lgamma(df / 2)) / std::sqrt(df * 3.14159265358979323846);
  auto pdf = [&](double x) { return c * std::pow(1 + x * x / df, -(df + 1) / 2); };
  const int steps = 200000;
  const double a = 0.0, b = std::abs(t), h = (b - a) / steps;
  double s = pdf(a) + pdf(b);
  for (int i = 1; i < steps; ++i) s += pdf(a + i * h) * (i % 2 ? 4 : 2);
  return 1.0 - 2.0 * (s * h / 3.0);
}

std::vector<ParetoEntry> table_five() {
  return {{"PCA", 67.5, 27, false},  {"LDA", 69.4, 35, false}, {"R-LDA", 69.2, 46, false},
          {"LFDA", 67.5, 39, false}, {"RDA", 69.4, 49, false}, {"DSB", 69.6, 87, false},
          {"Full", 67.1, 81, false}};
}

std::map<std::string, bool> dominance(const std::vector<ParetoEntry>& e) {
  std::map<std::string, bool> out;
  for (const auto& x : e) out[x.method] = x.dominated;
  return out;
}

}  // namespace

TEST_CASE("paired t-test reference value") {
  const std::vector<double> a = {1, 2, 3, 4, 5}, b = {0, 0, 0, 0, 0};
  const TTestResult r = paired_t_test(a, b);
  CHECK(r.t_stat == doctest::Approx(4.2426).epsilon(1e-4));
  CHECK(std::abs(r.p_value - 0.0132) < 5e-5);
  CHECK(std::abs(r.p_value - t_two_sided(r.t_stat, 4)) < 1e-9);
}

TEST_CASE("paired t-test p-values match numerical integration") {
  std::mt19937_64 rng(91);
  std::normal_distribution<double> n01;
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 2 + trial;
    std::vector<double> a(static_cast<std::size_t>(n)), b(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      a[static_cast<std::size_t>(i)] = n01(rng) + 0.3;
      b[static_cast<std::size_t>(i)] = n01(rng);
    }
    const TTestResult r = paired_t_test(a, b);
    CHECK(std::abs(r.p_value - t_two_sided(r.t_stat, n - 1)) < 1e-8);
    const TTestResult s = paired_t_test(b, a);
    CHECK(s.t_stat == doctest::Approx(-r.t_stat));
    CHECK(s.p_value == doctest::Approx(r.p_value));
  }
}

TEST_CASE("paired t-test degenerate rules") {
  const std::vector<double> x = {0.7, 0.7, 0.7};
  CHECK(paired_t_test(x, x).p_value == 1.0);
  const std::vector<double> y = {0.6, 0.6, 0.6};
  const TTestResult r = paired_t_test(x, y);
  CHECK(r.p_value == 0.0);
  CHECK(std::isinf(r.t_stat));
  CHECK(r.t_stat > 0);
  CHECK_THROWS_AS(paired_t_test(std::vector<double>{1.0}, std::vector<double>{0.0}), ArgumentError);
  CHECK_THROWS_AS(paired_t_test(std::vector<double>{1.0, 2.0}, std::vector<double>{0.0}), ArgumentError);
}

TEST_CASE("Wilcoxon documented examples") {
  const std::vector<double> zero = {0, 0, 0};
  CHECK(wilcoxon_signed_rank(zero, zero) == 1.0);
  const std::vector<double> a = {1, 2, 3, 4, 5}, b = {0, 0, 0, 0, 0};
  CHECK(wilcoxon_signed_rank(a, b) == doctest::Approx(0.0625));
  const std::vector<double> mixed = {-1, 2, 3, 4, 5};
  // W+ = 14: two of the 32 patterns reach 14 or more, so p = 2 * 2/32.
  CHECK(wilcoxon_signed_rank(mixed, b) == doctest::Approx(0.125));
  CHECK(wilcoxon_signed_rank(mixed, b) == doctest::Approx(wilcoxon_oracle({-1, 2, 3, 4, 5}, {0, 0, 0, 0, 0})));
  CHECK_THROWS_AS(wilcoxon_signed_rank(std::vector<double>{}, std::vector<double>{}), ArgumentError);
}

TEST_CASE("Wilcoxon enumeration matches the recursive oracle for n <= 10") {
  std::mt19937_64 rng(92);
  std::uniform_int_distribution<int> small(-4, 4);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(trial % 10);
    std::vector<double> a(n), b(n, 0.0);
    // Small integer differences produce plenty of ties and zeros.
    for (auto& v : a) v = small(rng) * 0.5;
    CHECK(wilcoxon_signed_rank(a, b) == doctest::Approx(wilcoxon_oracle(a, b)).epsilon(1e-12));
  }
}

TEST_CASE("Wilcoxon large-sample approximation is sane") {
  std::vector<double> a(40), b(40, 0.0);
  for (int i = 0; i < 40; ++i) a[static_cast<std::size_t>(i)] = (i % 2 ? 1.0 : -1.0) * (i + 1);
  const double p = wilcoxon_signed_rank(a, b);
  CHECK(p > 0.5);
  CHECK(p <= 1.0);
  for (auto& v : a) v = std::abs(v);
  CHECK(wilcoxon_signed_rank(a, b) < 1e-6);
}

TEST_CASE("Pareto frontier on the reported averages") {
  const auto out = dominance(pareto_frontier(table_five()));
  CHECK_FALSE(out.at("PCA"));
  CHECK_FALSE(out.at("LDA"));
  CHECK_FALSE(out.at("DSB"));
  CHECK(out.at("Full"));
  CHECK(out.at("LFDA"));
  CHECK(out.at("R-LDA"));
  CHECK(out.at("RDA"));

  auto shuffled = table_five();
  std::mt19937_64 rng(93);
  for (int i = 0; i < 20; ++i) {
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(dominance(pareto_frontier(shuffled)) == out);
  }
}

TEST_CASE("Pareto small cases") {
  CHECK_FALSE(pareto_frontier({{"only", 0.5, 1.0, false}})[0].dominated);
  const auto two = pareto_frontier({{"slow", 0.5, 2.0, false}, {"fast", 0.6, 1.0, false}});
  CHECK(two[0].dominated);
  CHECK_FALSE(two[1].dominated);
  const auto same = pareto_frontier({{"a", 0.5, 1.0, false}, {"b", 0.5, 1.0, false}});
  CHECK_FALSE(same[0].dominated);
  CHECK_FALSE(same[1].dominated);
}

TEST_CASE("correlation") {
  const std::vector<double> x = {1, 2, 3, 4}, y = {8, 6, 4, 2};
  CHECK(pearson_correlation(x, y) == doctest::Approx(-1.0));
  const std::vector<double> flat = {1, 1, 1, 1};
  CHECK_THROWS_AS(pearson_correlation(x, flat), UndefinedCorrelationError);
}

TEST_CASE("D/(C-1) correlation over the eight reported configurations") {
  const double dims[4] = {512, 2048, 576, 1280};
  const double gains[8] = {4.12, 0.26, 2.89, 0.89, 4.58, 0.72, 4.11, 0.55};
  std::vector<RatioConfig> configs;
  for (int i = 0; i < 8; ++i) configs.push_back({dims[i % 4], i < 4 ? 100.0 : 200.0, 50.0 + gains[i], 50.0});
  const double r = ratio_correlation(configs);
  CHECK(std::abs(r - (-0.78)) <= 0.05);
  CHECK(std::abs(r - (-0.7829)) < 1e-4);

  // Independent two-pass formula.
  double mx = 0, my = 0;
  for (int i = 0; i < 8; ++i) {
    mx += dims[i % 4] / (i < 4 ? 99.0 : 199.0) / 8;
    my += gains[i] / 8;
  }
  double sxy = 0, sxx = 0, syy = 0;
  for (int i = 0; i < 8; ++i) {
    const double dx = dims[i % 4] / (i < 4 ? 99.0 : 199.0) - mx, dy = gains[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  CHECK(r == doctest::Approx(sxy / std::sqrt(sxx * syy)).epsilon(1e-9));

  std::vector<RatioConfig> constant = configs;
  for (auto& c : constant) c.lda_accuracy = c.full_accuracy + 1.0;
  CHECK_THROWS_AS(ratio_correlation(constant), UndefinedCorrelationError);
  CHECK_THROWS_AS(ratio_correlation(std::span<const RatioConfig>(configs.data(), 2)), ArgumentError);
}
