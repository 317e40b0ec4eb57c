#include "discbench/errors.hpp"
#include "discbench/reducers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace discbench {

namespace {

constexpr Eigen::Index kBlockRows = 256;
constexpr double kInitialStep = 0.01;
constexpr double kGradientTolerance = 1e-5;
constexpr int kMaxHalvings = 60;
constexpr double kExpCutoff = 50.0;

}  // namespace

NcaEvaluation nca_evaluate(const Matrix& transform, const Matrix& features, const Labels& labels,
                           bool with_gradient) {
  if (transform.cols() != features.cols())
    throw DimensionError("nca: transform has " + std::to_string(transform.cols()) + " columns for " +
                         std::to_string(features.cols()) + " features");
  const Eigen::Index n = features.rows();
  if (static_cast<Eigen::Index>(labels.size()) != n) throw DimensionError("nca: label count mismatch");
  if (n < 2) throw DegenerateClassError("nca: need at least two samples");

  const Matrix y = features * transform.transpose();  // N x d
  const Vector sq = y.rowwise().squaredNorm();

  NcaEvaluation out;
  // Blockwise over rows i: weights w_ij = p_i p_ij - [y_i == y_j] p_ij, accumulated into
  // Q = diag(r + c) Y - W^T Y - W Y so that grad = 2 Q^T X without storing an N x N matrix.
  Vector row_sums = Vector::Zero(n);
  Vector col_sums = Vector::Zero(n);
  Matrix wt_y = Matrix::Zero(n, y.cols());  // W^T Y
  Matrix w_y = Matrix::Zero(n, y.cols());   // W Y

  Eigen::VectorXi label_vec(n);
  for (Eigen::Index j = 0; j < n; ++j) label_vec(j) = labels[static_cast<std::size_t>(j)];

  for (Eigen::Index start = 0; start < n; start += kBlockRows) {
    const Eigen::Index cols = std::min(kBlockRows, n - start);
    // Column a of prob holds sample i = start + a, so every per-sample pass is contiguous.
    Matrix prob = (-2.0 * y * y.middleRows(start, cols).transpose()).colwise() + sq;
    prob.rowwise() += sq.segment(start, cols).transpose();
    prob = prob.cwiseMax(0.0);

    for (Eigen::Index a = 0; a < cols; ++a) {
      const Eigen::Index i = start + a;
      auto col = prob.col(a);
      col(i) = std::numeric_limits<double>::infinity();
      const double nearest = col.minCoeff();
      // Terms below exp(-kExpCutoff) are dropped so no subnormals enter the sums.
      const auto gap = col.array() - nearest;
      col = (gap > kExpCutoff).select(0.0, (-gap.min(kExpCutoff)).exp()).matrix();
      col(i) = 0.0;
      const double z = col.sum();
      if (!std::isfinite(nearest) || !(z > 0.0) || !std::isfinite(z))
        throw NumericError("nca: non-finite objective (distance overflow); standardize features before fitting");
      col /= z;

      const auto same = (label_vec.array() == label_vec(i)).cast<double>();
      const double p_i = (col.array() * same).sum();
      out.objective += p_i;
      if (with_gradient) col = (col.array() * (p_i - same)).matrix();
    }
    if (!with_gradient) continue;
    // prob now holds the transposed gradient weights for this block of rows.
    row_sums.segment(start, cols) = prob.colwise().sum().transpose();
    col_sums += prob.rowwise().sum();
    wt_y += prob * y.middleRows(start, cols);
    w_y.middleRows(start, cols) = prob.transpose() * y;
  }

  if (!std::isfinite(out.objective))
    throw NumericError("nca: non-finite objective; standardize features before fitting");
  if (with_gradient) {
    const Matrix q = (row_sums + col_sums).asDiagonal() * y - wt_y - w_y;
    out.gradient = 2.0 * q.transpose() * features;
  }
  return out;
}

NcaResult fit_nca_traced(const FeatureDataset& train, std::optional<int> d, int max_iter, std::uint64_t seed) {
  (void)seed;  // PCA initialization and full-batch ascent are deterministic.
  train.validate();
  require_class_sizes(train, 2);
  const int cap = static_cast<int>(std::min<Eigen::Index>(train.size() - 1, train.dim()));
  const int dim = d.value_or(static_cast<int>(std::min<Eigen::Index>(train.num_classes - 1, cap)));
  if (dim < 1) throw ArgumentError("nca: output dimension must be >= 1");
  if (dim > cap)
    throw CapacityError("nca: requested " + std::to_string(dim) + " dimensions, maximum is " + std::to_string(cap));

  const RowVector mean = train.features.colwise().mean();
  const Matrix x = train.features.rowwise() - mean;
  Matrix a = fit_pca(train.features, dim).weights.transpose();  // d x D

  NcaResult result;
  NcaEvaluation current = nca_evaluate(a, x, train.labels, true);
  result.objective_trace.push_back(current.objective);
  double step = kInitialStep;
  for (int it = 0; it < max_iter; ++it) {
    if (current.gradient.cwiseAbs().maxCoeff() < kGradientTolerance) break;
    bool accepted = false;
    for (int h = 0; h <= kMaxHalvings && !accepted; ++h) {
      const Matrix trial = a + step * current.gradient;
      try {
        NcaEvaluation next = nca_evaluate(trial, x, train.labels, true);
        if (next.objective >= current.objective) {
          a = trial;
          current = std::move(next);
          accepted = true;
          break;
        }
      } catch (const NumericError&) {
        // Overshoot into overflow: treat like an objective decrease.
      }
      step *= 0.5;
    }
    if (!accepted) break;
    result.objective_trace.push_back(current.objective);
    ++result.iterations;
  }

  Matrix w = a.transpose();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(w.cols()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const Vector norms = w.colwise().squaredNorm().transpose();
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index l, Eigen::Index r) { return norms(l) > norms(r); });
  Matrix sorted(w.rows(), w.cols());
  Vector values(w.cols());
  for (std::size_t k = 0; k < order.size(); ++k) {
    sorted.col(static_cast<Eigen::Index>(k)) = w.col(order[k]);
    values(static_cast<Eigen::Index>(k)) = norms(order[k]);
  }
  canonicalize_signs(sorted);
  result.projection.weights = std::move(sorted);
  result.projection.center = mean;
  result.projection.discriminant_values = std::move(values);
  result.projection.method_name = "nca";
  return result;
}

Projection fit_nca(const FeatureDataset& train, std::optional<int> d, int max_iter, std::uint64_t seed) {
  return fit_nca_traced(train, d, max_iter, seed).projection;
}

}  // namespace discbench
