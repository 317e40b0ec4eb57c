#pragma once

#include "discbench/data.hpp"
#include "discbench/numerics.hpp"

#include <optional>
#include <span>
#include <vector>

namespace discbench {

/// Per-class and global means. With sample weights, `class_weight_sums`
/// holds the (normalized) weight mass per class and all means are weighted;
/// without weights it equals `class_counts`.
struct ClassStats {
  Matrix class_means;  // C x D, row c is mu_c
  RowVector global_mean;
  std::vector<Eigen::Index> class_counts;
  std::vector<double> class_weight_sums;
};

struct ScatterPair {
  Matrix s_b;
  Matrix s_w;
};

struct ShrinkageEstimate {
  double alpha = 0.0;
  Matrix shrunk_sw;
};

/// Rescales non-negative weights to sum to N. Throws ArgumentError on wrong
/// length, negative or non-finite entries, or a zero sum.
std::vector<double> normalize_weights(std::span<const double> weights, Eigen::Index n);

/// Throws DegenerateClassError if any class in [0, C) is empty.
ClassStats compute_class_stats(const FeatureDataset& dataset,
                               std::optional<std::span<const double>> weights = std::nullopt);

/// Between- and within-class scatter:
///   S_b = sum_c m_c (mu_c - mu)(mu_c - mu)^T
///   S_w = sum_i w_i (z_i - mu_{y_i})(z_i - mu_{y_i})^T
/// where m_c is the class count (unweighted) or class weight mass.
ScatterPair compute_scatter(const FeatureDataset& dataset, const ClassStats& stats,
                            std::optional<std::span<const double>> weights = std::nullopt);

/// Rows sqrt(w_i) (z_i - mu_{y_i}); its Gram matrix is S_w.
Matrix within_class_centered(const FeatureDataset& dataset, const ClassStats& stats,
                             std::optional<std::span<const double>> weights = std::nullopt);

/// Rows sqrt(m_c) (mu_c - mu); its Gram matrix is S_b.
Matrix between_class_factor(const ClassStats& stats);

/// Ledoit-Wolf shrinkage toward the scaled identity (trace(S)/D) I.
///
/// `covariance` is S (the within-class scatter divided by N) and
/// `samples_centered` the N class-centered rows it was formed from. With
///   delta2 = ||S - mu I||_F^2,  mu = trace(S)/D,
///   beta2  = min(delta2, (1/N^2) sum_k ||x_k x_k^T - S||_F^2)
/// the intensity is alpha = beta2 / delta2, and alpha = 1 when delta2 == 0.
ShrinkageEstimate ledoit_wolf_shrink(const Matrix& covariance, const Matrix& samples_centered);

/// (1 - alpha) S + alpha (trace(S)/D) I
Matrix shrink_toward_identity(const Matrix& s, double alpha);

}  // namespace discbench
