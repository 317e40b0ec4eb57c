#pragma once

#include "discbench/numerics.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace discbench {

using Labels = std::vector<int>;

/// Frozen backbone features with integer class labels in [0, num_classes).
struct FeatureDataset {
  Matrix features;  // N x D
  Labels labels;    // length N
  int num_classes = 0;
  std::string backbone_name;
  std::string dataset_name;

  Eigen::Index size() const { return features.rows(); }
  Eigen::Index dim() const { return features.cols(); }

  /// Throws on shape/label violations. Does not require every class to be
  /// populated; reducers check that at fit time.
  void validate() const;

  std::vector<Eigen::Index> class_counts() const;
};

// FZF1 binary layout, little-endian:
//   "FZF1" | u32 version=1 | u32 len + backbone | u32 len + dataset |
//   u32 N | u32 D | u32 C | N*D float32 row-major | N u32 labels
inline constexpr char kFeatureMagic[4] = {'F', 'Z', 'F', '1'};
inline constexpr std::uint32_t kFeatureVersion = 1;

FeatureDataset read_feature_file(const std::filesystem::path& path);
void write_feature_file(const FeatureDataset& dataset, const std::filesystem::path& path);

/// Rows of `dataset` at `indices`, in the order given.
FeatureDataset select_rows(const FeatureDataset& dataset, const std::vector<Eigen::Index>& indices);

/// Keeps max(1, floor(fraction * n_c)) samples of each class c.
///
/// One SplitMix64 stream seeded with `seed` is consumed class by class in
/// ascending class order. Within a class, the member indices (in original
/// order) are partially Fisher-Yates shuffled: for i = 0..m-1 swap slot i with
/// slot i + bounded(n_c - i). The first m slots are kept and the union over all
/// classes is returned sorted by original row index. fraction == 1 returns the
/// dataset unchanged.
FeatureDataset stratified_subsample(const FeatureDataset& dataset, double fraction, std::uint64_t seed);

/// Per-column affine standardization fitted on training features.
struct Standardizer {
  static constexpr double kMinStd = 1e-8;

  RowVector means;
  RowVector stds;  // population (1/N) deviation; columns below kMinStd get 1.0

  static Standardizer fit(const Matrix& features);
  Matrix transform(const Matrix& features) const;
};

}  // namespace discbench
