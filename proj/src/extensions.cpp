#include "discbench/extensions.hpp"

#include "discbench/errors.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace discbench {

int default_rda_components(Eigen::Index dim) { return dim <= 1024 ? 20 : 30; }

Matrix lda_residual_operator(const Matrix& lda_weights, ResidualMode mode) {
  const Eigen::Index dim = lda_weights.rows();
  Matrix reconstruct;
  if (mode == ResidualMode::least_squares) {
    // W (W^T W)^{-1} W^T through a QR basis of span(W); W has full column rank after whitening.
    const Matrix q = orthonormal_basis(lda_weights);
    reconstruct = q * q.transpose();
  } else {
    reconstruct = lda_weights * lda_weights.transpose();
  }
  return Matrix::Identity(dim, dim) - reconstruct;
}

Projection fit_rda(const FeatureDataset& train, const RdaConfig& config) {
  const Projection lda = fit_lda(train);
  const Eigen::Index base = lda.out_dim();
  const Eigen::Index room = train.dim() - base;
  int k = 0;
  if (config.residual_components) {
    k = *config.residual_components;
    if (k < 0) throw ArgumentError("rda: residual component count must be >= 0");
    if (k > room)
      throw CapacityError("rda: " + std::to_string(k) + " residual components requested, at most D-(C-1) = " +
                          std::to_string(room));
  } else {
    k = static_cast<int>(std::min<Eigen::Index>(default_rda_components(train.dim()), room));
  }
  k = static_cast<int>(std::min<Eigen::Index>(k, train.size() - 1));
  if (k == 0) {
    Projection p = lda;
    p.method_name = "rda";
    return p;
  }

  const Matrix residual_op = lda_residual_operator(lda.weights, config.mode);
  const Matrix residuals = (train.features.rowwise() - lda.center) * residual_op.transpose();
  const Projection residual_pca = fit_pca(residuals, k);

  Projection p;
  p.weights.resize(train.dim(), base + k);
  p.weights.leftCols(base) = lda.weights;
  Matrix extra = residual_op.transpose() * residual_pca.weights;
  canonicalize_signs(extra);
  p.weights.rightCols(k) = extra;
  p.center = lda.center;
  p.discriminant_values.resize(base + k);
  p.discriminant_values << lda.discriminant_values, residual_pca.discriminant_values;
  p.method_name = "rda";
  return p;
}

namespace {

std::vector<int> nearest_centroid(const Matrix& projected, const Labels& labels, int num_classes) {
  Matrix centroids = Matrix::Zero(num_classes, projected.cols());
  std::vector<double> counts(static_cast<std::size_t>(num_classes), 0.0);
  for (Eigen::Index i = 0; i < projected.rows(); ++i) {
    const int y = labels[static_cast<std::size_t>(i)];
    centroids.row(y) += projected.row(i);
    counts[static_cast<std::size_t>(y)] += 1.0;
  }
  for (int c = 0; c < num_classes; ++c) centroids.row(c) /= counts[static_cast<std::size_t>(c)];

  std::vector<int> predicted(static_cast<std::size_t>(projected.rows()));
  for (Eigen::Index i = 0; i < projected.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    int arg = 0;
    for (int c = 0; c < num_classes; ++c) {
      const double dist = (projected.row(i) - centroids.row(c)).squaredNorm();
      if (dist < best) {
        best = dist;
        arg = c;
      }
    }
    predicted[static_cast<std::size_t>(i)] = arg;
  }
  return predicted;
}

}  // namespace

DsbFit fit_dsb_traced(const FeatureDataset& train, const DsbConfig& config, std::optional<int> d) {
  if (config.rounds < 1) throw ArgumentError("dsb: rounds must be >= 1");
  if (!(config.weight_growth > 1.0)) throw ArgumentError("dsb: weight growth must exceed 1");
  const auto n = static_cast<std::size_t>(train.size());

  DsbFit fit;
  std::vector<double> weights(n, 1.0);
  fit.round_weights.push_back(weights);
  fit.projection = fit_lda(train, d, std::span<const double>(weights));
  for (int round = 2; round <= config.rounds; ++round) {
    const std::vector<int> predicted =
        nearest_centroid(transform(fit.projection, train.features), train.labels, train.num_classes);
    Eigen::Index wrong = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (predicted[i] != train.labels[i]) {
        weights[i] *= config.weight_growth;
        ++wrong;
      }
    fit.misclassified_per_round.push_back(wrong);
    if (wrong == 0) break;  // nothing to reweight; later rounds would refit the same LDA
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    const double scale = static_cast<double>(n) / total;
    for (double& w : weights) w *= scale;
    fit.round_weights.push_back(weights);
    fit.projection = fit_lda(train, d, std::span<const double>(weights));
  }
  fit.projection.method_name = "dsb";
  return fit;
}

Projection fit_dsb(const FeatureDataset& train, const DsbConfig& config, std::optional<int> d) {
  return fit_dsb_traced(train, config, d).projection;
}

}  // namespace discbench
