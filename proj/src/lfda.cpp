#include "discbench/errors.hpp"
#include "discbench/reducers.hpp"

#include <algorithm>
#include <cmath>

namespace discbench {

namespace {

// diag(W 1) - W for symmetric W, so that X^T L X = 1/2 sum_ij W_ij (x_i - x_j)(x_i - x_j)^T.
Matrix laplacian(const Matrix& w) {
  Matrix l = -w;
  l.diagonal() += w.rowwise().sum();
  return l;
}

Matrix pairwise_sq_distances(const Matrix& x) {
  const Vector sq = x.rowwise().squaredNorm();
  Matrix d2 = (-2.0 * x * x.transpose()).colwise() + sq;
  d2.rowwise() += sq.transpose();
  d2 = d2.cwiseMax(0.0);
  d2.diagonal().setZero();
  return d2;
}

}  // namespace

ScatterPair local_scatter(const FeatureDataset& train, int k) {
  train.validate();
  if (k < 1) throw ArgumentError("lfda: neighbour count must be >= 1");
  require_class_sizes(train, 2);

  const Eigen::Index n = train.size();
  const double inv_n = 1.0 / static_cast<double>(n);
  const RowVector mean = train.features.colwise().mean();
  const Matrix centered = train.features.rowwise() - mean;

  std::vector<std::vector<Eigen::Index>> members(static_cast<std::size_t>(train.num_classes));
  for (Eigen::Index i = 0; i < n; ++i) members[static_cast<std::size_t>(train.labels[static_cast<std::size_t>(i)])].push_back(i);

  ScatterPair out;
  // Every pair starts at the 1/N between-class weight: that part is the total scatter.
  out.s_b = centered.transpose() * centered;
  out.s_w = Matrix::Zero(train.dim(), train.dim());

  for (const auto& idx : members) {
    const auto n_c = static_cast<Eigen::Index>(idx.size());
    Matrix xc(n_c, train.dim());
    for (Eigen::Index a = 0; a < n_c; ++a) xc.row(a) = centered.row(idx[static_cast<std::size_t>(a)]);

    const Matrix d2 = pairwise_sq_distances(xc);
    const Eigen::Index kc = std::min<Eigen::Index>(k, n_c - 1);
    Vector sigma(n_c);
    std::vector<double> row(static_cast<std::size_t>(n_c));
    for (Eigen::Index a = 0; a < n_c; ++a) {
      for (Eigen::Index b = 0; b < n_c; ++b) row[static_cast<std::size_t>(b)] = d2(a, b);
      // Position 0 after sorting is the point itself (distance 0).
      std::nth_element(row.begin(), row.begin() + kc, row.end());
      sigma(a) = std::sqrt(row[static_cast<std::size_t>(kc)]);
    }

    Matrix affinity(n_c, n_c);
    for (Eigen::Index a = 0; a < n_c; ++a)
      for (Eigen::Index b = 0; b < n_c; ++b) {
        const double scale = sigma(a) * sigma(b);
        affinity(a, b) = scale > 0.0 ? std::exp(-d2(a, b) / scale) : (d2(a, b) == 0.0 ? 1.0 : 0.0);
      }

    const double inv_nc = 1.0 / static_cast<double>(n_c);
    const Matrix w_within = affinity * inv_nc;
    const Matrix w_between_delta = (affinity * (inv_n - inv_nc)).array() - inv_n;
    out.s_w += xc.transpose() * laplacian(w_within) * xc;
    out.s_b += xc.transpose() * laplacian(w_between_delta) * xc;
  }
  out.s_w = 0.5 * (out.s_w + out.s_w.transpose()).eval();
  out.s_b = 0.5 * (out.s_b + out.s_b.transpose()).eval();
  return out;
}

Projection fit_lfda(const FeatureDataset& train, std::optional<int> d, int k) {
  const ScatterPair local = local_scatter(train, k);
  const int cap = static_cast<int>(std::min<Eigen::Index>(train.num_classes - 1, train.dim()));
  if (d && *d < 1) throw ArgumentError("lfda: output dimension must be >= 1");
  if (d && *d > cap)
    throw CapacityError("lfda: requested " + std::to_string(*d) + " dimensions, maximum is " + std::to_string(cap));
  const int dim = d.value_or(cap);
  if (dim < 1) throw CapacityError("lfda: no output dimension available on this data");

  const DiscriminantSolution sol = solve_discriminant_matrices(local.s_b, local.s_w, dim);
  Matrix weights = sol.directions;
  canonicalize_signs(weights);
  Projection p;
  p.weights = std::move(weights);
  p.center = train.features.colwise().mean();
  p.discriminant_values = sol.values;
  p.method_name = "lfda";
  return p;
}

}  // namespace discbench
