#pragma once

#include "discbench/reducers.hpp"

#include <vector>

namespace discbench {

/// Default residual component count: 20 for D <= 1024, 30 above.
int default_rda_components(Eigen::Index dim);

/// D x D operator mapping a centered sample to its LDA residual.
Matrix lda_residual_operator(const Matrix& lda_weights, ResidualMode mode);

/// LDA at d = C - 1 augmented with the top-k principal directions of the
/// LDA residuals. Weights are [W_lda | R^T W_res] with R the residual
/// operator, so transform() reproduces the augmented feature exactly.
Projection fit_rda(const FeatureDataset& train, const RdaConfig& config = {});

struct DsbFit {
  Projection projection;
  std::vector<std::vector<double>> round_weights;  // weights used to fit each round
  std::vector<Eigen::Index> misclassified_per_round;
};

/// Boosted LDA: round 1 is unweighted LDA; each later round reweights the
/// samples misclassified by nearest centroid in the current projected space
/// by `weight_growth`, renormalizes to sum N and refits weighted LDA.
DsbFit fit_dsb_traced(const FeatureDataset& train, const DsbConfig& config = {},
                      std::optional<int> d = std::nullopt);
Projection fit_dsb(const FeatureDataset& train, const DsbConfig& config = {},
                   std::optional<int> d = std::nullopt);

}  // namespace discbench
