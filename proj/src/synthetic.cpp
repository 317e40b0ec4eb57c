#include "discbench/synthetic.hpp"

#include "discbench/errors.hpp"
#include "discbench/random.hpp"

namespace discbench {

namespace {

Matrix random_gaussian(Eigen::Index rows, Eigen::Index cols, SplitMix64& rng) {
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
  return m;
}

}  // namespace

SyntheticTask::SyntheticTask(const SyntheticSpec& spec) : spec_(spec) {
  if (spec.num_classes < 2 || spec.dim < 1) throw ArgumentError("synthetic: need C >= 2 and D >= 1");
  if (spec.informative_dims < 1 || spec.informative_dims > spec.dim)
    throw ArgumentError("synthetic: informative_dims must lie in [1, D]");
  if (spec.nuisance_rank < 0 || spec.nuisance_rank > spec.dim)
    throw ArgumentError("synthetic: nuisance_rank must lie in [0, D]");

  SplitMix64 rng(spec.seed);
  const Matrix basis = orthonormal_basis(random_gaussian(spec.dim, spec.informative_dims, rng));
  const Matrix coords = random_gaussian(spec.num_classes, spec.informative_dims, rng) * spec.separation;
  means_ = coords * basis.transpose();
  if (spec.nuisance_rank > 0)
    nuisance_ = orthonormal_basis(random_gaussian(spec.dim, spec.nuisance_rank, rng));
  else
    nuisance_ = Matrix::Zero(spec.dim, 0);
}

Matrix SyntheticTask::covariance() const {
  Matrix cov = spec_.noise_scale * spec_.noise_scale * Matrix::Identity(spec_.dim, spec_.dim);
  cov += spec_.nuisance_scale * spec_.nuisance_scale * nuisance_ * nuisance_.transpose();
  return cov;
}

FeatureDataset SyntheticTask::sample(int per_class, std::uint64_t stream) const {
  if (per_class < 1) throw ArgumentError("synthetic: per_class must be >= 1");
  SplitMix64 rng(spec_.seed ^ (0xD1B54A32D192ED03ULL * (stream + 1)));
  const Eigen::Index n = static_cast<Eigen::Index>(per_class) * spec_.num_classes;
  FeatureDataset ds;
  ds.num_classes = spec_.num_classes;
  ds.backbone_name = "synthetic";
  ds.dataset_name = "gaussian-c" + std::to_string(spec_.num_classes) + "-d" + std::to_string(spec_.dim);
  ds.features.resize(n, spec_.dim);
  ds.labels.resize(static_cast<std::size_t>(n));
  Eigen::Index row = 0;
  for (int c = 0; c < spec_.num_classes; ++c)
    for (int k = 0; k < per_class; ++k, ++row) {
      RowVector x = means_.row(c);
      for (Eigen::Index j = 0; j < spec_.dim; ++j) x(j) += spec_.noise_scale * rng.normal();
      for (Eigen::Index r = 0; r < nuisance_.cols(); ++r) x += spec_.nuisance_scale * rng.normal() * nuisance_.col(r).transpose();
      ds.features.row(row) = x;
      ds.labels[static_cast<std::size_t>(row)] = c;
    }
  return ds;
}

}  // namespace discbench
