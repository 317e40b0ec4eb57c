#pragma once

#include "discbench/data.hpp"

#include <cstdint>

namespace discbench {

/// Gaussian classes sharing one covariance:
///   x = mu_c + noise_scale * e + nuisance_scale * U g,   e ~ N(0, I_D), g ~ N(0, I_r)
/// Class means live in a random `informative_dims`-dimensional subspace and U
/// spans a random `nuisance_rank`-dimensional subspace of high shared variance,
/// so variance-ranked directions and discriminative directions differ.
struct SyntheticSpec {
  int num_classes = 10;
  int dim = 64;
  int informative_dims = 9;
  double separation = 1.5;
  int nuisance_rank = 0;
  double nuisance_scale = 0.0;
  double noise_scale = 1.0;
  std::uint64_t seed = 0;
};

class SyntheticTask {
public:
  explicit SyntheticTask(const SyntheticSpec& spec);

  /// `per_class` samples of every class, grouped by class; `stream` selects an
  /// independent sample stream so train and test draws never overlap.
  FeatureDataset sample(int per_class, std::uint64_t stream) const;

  const Matrix& means() const { return means_; }   // C x D
  Matrix covariance() const;                       // D x D
  const SyntheticSpec& spec() const { return spec_; }

private:
  SyntheticSpec spec_;
  Matrix means_;
  Matrix nuisance_;  // D x r, orthonormal columns
};

}  // namespace discbench
