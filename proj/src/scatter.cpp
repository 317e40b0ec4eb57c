#include "discbench/scatter.hpp"

#include "discbench/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace discbench {

std::vector<double> normalize_weights(std::span<const double> weights, Eigen::Index n) {
  if (static_cast<Eigen::Index>(weights.size()) != n)
    throw ArgumentError("expected " + std::to_string(n) + " sample weights, got " +
                        std::to_string(weights.size()));
  double total = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) throw ArgumentError("sample weights must be finite and non-negative");
    total += w;
  }
  if (!(total > 0.0)) throw ArgumentError("sample weights sum to zero");
  std::vector<double> out(weights.begin(), weights.end());
  const double scale = static_cast<double>(n) / total;
  if (scale != 1.0)
    for (double& w : out) w *= scale;
  return out;
}

ClassStats compute_class_stats(const FeatureDataset& dataset, std::optional<std::span<const double>> weights) {
  dataset.validate();
  const Eigen::Index n = dataset.size();
  const auto c = static_cast<std::size_t>(dataset.num_classes);
  std::vector<double> w = weights ? normalize_weights(*weights, n) : std::vector<double>(static_cast<std::size_t>(n), 1.0);

  ClassStats stats;
  stats.class_means = Matrix::Zero(dataset.num_classes, dataset.dim());
  stats.class_counts.assign(c, 0);
  stats.class_weight_sums.assign(c, 0.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto y = static_cast<std::size_t>(dataset.labels[static_cast<std::size_t>(i)]);
    const double wi = w[static_cast<std::size_t>(i)];
    stats.class_means.row(static_cast<Eigen::Index>(y)) += wi * dataset.features.row(i);
    ++stats.class_counts[y];
    stats.class_weight_sums[y] += wi;
  }
  for (std::size_t k = 0; k < c; ++k) {
    if (stats.class_counts[k] == 0)
      throw DegenerateClassError("class " + std::to_string(k) + " has no samples");
    if (!(stats.class_weight_sums[k] > 0.0))
      throw DegenerateClassError("class " + std::to_string(k) + " has zero total weight");
    stats.class_means.row(static_cast<Eigen::Index>(k)) /= stats.class_weight_sums[k];
  }

  const double mass = std::accumulate(stats.class_weight_sums.begin(), stats.class_weight_sums.end(), 0.0);
  stats.global_mean = RowVector::Zero(dataset.dim());
  for (std::size_t k = 0; k < c; ++k)
    stats.global_mean += stats.class_weight_sums[k] * stats.class_means.row(static_cast<Eigen::Index>(k));
  stats.global_mean /= mass;
  return stats;
}

Matrix within_class_centered(const FeatureDataset& dataset, const ClassStats& stats,
                             std::optional<std::span<const double>> weights) {
  if (stats.class_means.cols() != dataset.dim() || stats.class_means.rows() != dataset.num_classes)
    throw DimensionError("class statistics do not match dataset shape");
  const Eigen::Index n = dataset.size();
  Matrix centered(n, dataset.dim());
  std::vector<double> w;
  if (weights) w = normalize_weights(*weights, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    centered.row(i) = dataset.features.row(i) - stats.class_means.row(dataset.labels[static_cast<std::size_t>(i)]);
    if (weights) centered.row(i) *= std::sqrt(w[static_cast<std::size_t>(i)]);
  }
  return centered;
}

Matrix between_class_factor(const ClassStats& stats) {
  Matrix factor = stats.class_means.rowwise() - stats.global_mean;
  for (Eigen::Index k = 0; k < factor.rows(); ++k)
    factor.row(k) *= std::sqrt(stats.class_weight_sums[static_cast<std::size_t>(k)]);
  return factor;
}

ScatterPair compute_scatter(const FeatureDataset& dataset, const ClassStats& stats,
                            std::optional<std::span<const double>> weights) {
  const Matrix hw = within_class_centered(dataset, stats, weights);
  const Matrix hb = between_class_factor(stats);
  ScatterPair out;
  out.s_w = hw.transpose() * hw;
  out.s_b = hb.transpose() * hb;
  // Gram products are symmetric up to rounding; make it exact.
  out.s_w = 0.5 * (out.s_w + out.s_w.transpose()).eval();
  out.s_b = 0.5 * (out.s_b + out.s_b.transpose()).eval();
  return out;
}

Matrix shrink_toward_identity(const Matrix& s, double alpha) {
  const Eigen::Index d = s.rows();
  const double mu = s.trace() / static_cast<double>(d);
  Matrix out = (1.0 - alpha) * s;
  out.diagonal().array() += alpha * mu;
  return out;
}

ShrinkageEstimate ledoit_wolf_shrink(const Matrix& covariance, const Matrix& samples_centered) {
  if (covariance.rows() != covariance.cols()) throw DimensionError("Ledoit-Wolf: covariance not square");
  if (samples_centered.cols() != covariance.cols())
    throw DimensionError("Ledoit-Wolf: samples have " + std::to_string(samples_centered.cols()) +
                         " columns, covariance is " + std::to_string(covariance.cols()));
  const Eigen::Index n = samples_centered.rows();
  const Eigen::Index d = covariance.rows();
  if (n == 0 && covariance.isZero(0.0)) throw DegenerateError("Ledoit-Wolf: no samples and zero covariance");
  if (n == 0) throw DegenerateError("Ledoit-Wolf: no samples");

  const double mu = covariance.trace() / static_cast<double>(d);
  Matrix deviation = covariance;
  deviation.diagonal().array() -= mu;
  const double delta2 = deviation.squaredNorm();

  ShrinkageEstimate est;
  if (!(delta2 > 0.0)) {
    est.alpha = 1.0;
  } else {
    // sum_k ||x_k x_k^T - S||_F^2 = sum_k ||x_k||^4 - 2 sum_k x_k^T S x_k + N ||S||_F^2
    const double nn = static_cast<double>(n);
    const Vector sq = samples_centered.rowwise().squaredNorm();
    const double quartic = sq.squaredNorm();
    const double cross = (samples_centered * covariance).cwiseProduct(samples_centered).sum();
    const double total = std::max(0.0, quartic - 2.0 * cross + nn * covariance.squaredNorm());
    const double beta2 = std::min(delta2, total / (nn * nn));
    est.alpha = std::clamp(beta2 / delta2, 0.0, 1.0);
  }
  est.shrunk_sw = shrink_toward_identity(covariance, est.alpha);
  return est;
}

}  // namespace discbench
