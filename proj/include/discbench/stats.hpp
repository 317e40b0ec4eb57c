#pragma once

#include <span>
#include <string>
#include <vector>

namespace discbench {

struct TTestResult {
  double t_stat = 0.0;
  double p_value = 1.0;
};

/// Two-sided paired t-test on d = a - b with n - 1 degrees of freedom.
/// Zero sample deviation gives p = 1 when mean(d) == 0 and p = 0 otherwise
/// (t is then 0 or +/-infinity).
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b);

/// Two-sided Wilcoxon signed-rank p-value for paired samples. Zero
/// differences are dropped; tied magnitudes share their average rank. For up
/// to 25 non-zero differences the null distribution is enumerated exactly over
/// all 2^n sign patterns, p = min(1, 2 min(P(W+ <= w), P(W+ >= w))). Larger n
/// uses the tie-corrected normal approximation. All-zero differences give 1.
double wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b);

inline constexpr int kWilcoxonExactLimit = 25;

struct ParetoEntry {
  std::string method;
  double accuracy = 0.0;
  double seconds = 0.0;
  bool dominated = false;
};

/// Marks an entry dominated when another is at least as fast and at least as
/// accurate, strictly better in one of the two.
std::vector<ParetoEntry> pareto_frontier(std::vector<ParetoEntry> entries);

double pearson_correlation(std::span<const double> x, std::span<const double> y);

/// One backbone/dataset configuration for the D/(C-1) analysis.
struct RatioConfig {
  double feature_dim = 0.0;  // D
  double num_classes = 0.0;  // C
  double lda_accuracy = 0.0;
  double full_accuracy = 0.0;
};

/// Pearson r between D/(C-1) and (LDA accuracy - Full accuracy) over >= 3
/// configurations. Throws UndefinedCorrelationError when either series is constant.
double ratio_correlation(std::span<const RatioConfig> configs);

}  // namespace discbench
